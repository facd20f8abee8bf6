#ifndef PAMSIM_METRICS_HPP
#define PAMSIM_METRICS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pamsim/channel.hpp"
#include "pamsim/shaping.hpp"

namespace pamsim {

struct BerResult {
    std::uint64_t bit_errors = 0;
    std::uint64_t bits_compared = 0;
    std::uint64_t symbol_errors = 0;
    std::uint64_t symbols_compared = 0;
    double ber = 0.0;
};

// Gray-demap both streams and count differing bits
BerResult ber_count(const std::vector<int>& tx_symbols,
                    const std::vector<int>& rx_symbols, int m);

// H₂(p) = −p·log₂p − (1−p)·log₂(1−p), with 0·log 0 = 0
double binary_entropy(double p);

// [H − m·H₂(ber)]⁺, bits/symbol under bitwise hard decision
double se_hd(double entropy_bits, int m, double ber);

// Gb/s = GBd · bits/symbol
double air_gbps(double symbol_rate_gbd, double se_hd_bits);

// [H − m(1 − R_FEC)]⁺ with R_FEC = 1/(1 + fec_oh)
double se_pas(double entropy_bits, int m, double fec_oh);

// m/H − 1
double ps_overhead(double entropy_bits, int m);

// net rate with a fixed-overhead FEC; absent above the BER threshold
std::optional<double> onbr_gbps(double symbol_rate_gbd, double entropy_bits, int m,
                                double fec_oh, double ber, double threshold);

// Per-transmitted-level binned distributions of equalized values over a
// fixed [−9, 9] range, plus their aggregate.
struct LevelHistograms {
    PamConstellation constellation;
    int bins = 0;
    double lo = -9.0;
    double hi = 9.0;
    std::vector<std::vector<std::uint64_t>> counts; // [level index][bin]

    double bin_center(int b) const;
    std::vector<std::uint64_t> aggregate() const;
    std::uint64_t total() const;
};

LevelHistograms level_histogram(const std::vector<double>& equalized,
                                const std::vector<int>& tx_symbols, int bins, int m);

// Σ over adjacent level pairs of the shared (min) counts, as a fraction of
// the total mass; grows as neighboring level clouds blur into each other
double adjacent_overlap_mass(const LevelHistograms& h);

// 10·log₁₀ of mean optical power on the top level over the bottom level,
// sampled at noiseless symbol centers of the waveform at `oversample` sps
double extinction_ratio_db(const Waveform& optical, const std::vector<int>& tx_symbols,
                           int oversample);

struct TrialReport {
    double ber = 0.0;
    std::uint64_t bit_errors = 0;
    std::uint64_t bits_compared = 0;
    std::uint64_t symbol_errors = 0;
    std::uint64_t symbols_compared = 0;
    double entropy_bits = 0.0;
    double symbol_rate_gbd = 0.0;
    double air_gbps = 0.0;
    std::optional<double> onbr_gbps;
    double extinction_ratio_db = 0.0;
    LevelHistograms histograms;
};

// CSV `level,bin_center,count`
void write_histogram_csv(const std::string& path, const LevelHistograms& h);

} // namespace pamsim

#endif
