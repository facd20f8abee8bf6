#include "pamsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace pamsim {

BerResult ber_count(const std::vector<int>& tx_symbols,
                    const std::vector<int>& rx_symbols, int m) {
    if (tx_symbols.size() != rx_symbols.size())
        throw std::invalid_argument("ber_count: stream length mismatch");
    BerResult r;
    r.symbols_compared = tx_symbols.size();
    r.bits_compared = tx_symbols.size() * static_cast<std::uint64_t>(m);
    const int n = 1 << m;
    for (std::size_t i = 0; i < tx_symbols.size(); ++i) {
        if (tx_symbols[i] == rx_symbols[i])
            continue;
        ++r.symbol_errors;
        const unsigned ia = static_cast<unsigned>((tx_symbols[i] + n - 1) / 2);
        const unsigned ib = static_cast<unsigned>((rx_symbols[i] + n - 1) / 2);
        const unsigned diff = (ia ^ (ia >> 1)) ^ (ib ^ (ib >> 1)); // Gray labels
        r.bit_errors += static_cast<std::uint64_t>(__builtin_popcount(diff));
    }
    r.ber = r.bits_compared ? static_cast<double>(r.bit_errors) /
                                  static_cast<double>(r.bits_compared)
                            : 0.0;
    return r;
}

double binary_entropy(double p) {
    if (!(p >= 0.0) || !(p <= 1.0))
        throw std::domain_error("binary_entropy: p must be in [0, 1]");
    const double ln2 = 0.69314718055994530941723212145818;
    double h = 0.0;
    if (p > 0.0)
        h -= p * std::log(p);
    if (p < 1.0)
        h -= (1.0 - p) * std::log(1.0 - p);
    return h / ln2;
}

double se_hd(double entropy_bits, int m, double ber) {
    return std::max(0.0, entropy_bits - m * binary_entropy(ber));
}

double air_gbps(double symbol_rate_gbd, double se_hd_bits) {
    return symbol_rate_gbd * se_hd_bits;
}

double se_pas(double entropy_bits, int m, double fec_oh) {
    if (fec_oh < 0.0)
        throw std::domain_error("se_pas: fec_oh must be >= 0");
    const double r_fec = 1.0 / (1.0 + fec_oh);
    // PAS needs R_FEC > (m−1)/m; larger overheads stop being realizable
    if (r_fec <= static_cast<double>(m - 1) / m)
        std::fputs("se_pas: warning: FEC rate at or below the PAS floor (m-1)/m\n", stderr);
    return std::max(0.0, entropy_bits - m * (1.0 - r_fec));
}

double ps_overhead(double entropy_bits, int m) {
    if (!(entropy_bits > 0.0))
        throw std::domain_error("ps_overhead: entropy must be > 0");
    return static_cast<double>(m) / entropy_bits - 1.0;
}

std::optional<double> onbr_gbps(double symbol_rate_gbd, double entropy_bits, int m,
                                double fec_oh, double ber, double threshold) {
    if (!(threshold > 0.0))
        throw std::domain_error("onbr_gbps: threshold must be > 0");
    if (ber > threshold)
        return std::nullopt;
    return symbol_rate_gbd * se_pas(entropy_bits, m, fec_oh);
}

double LevelHistograms::bin_center(int b) const {
    return lo + (b + 0.5) * (hi - lo) / bins;
}

std::vector<std::uint64_t> LevelHistograms::aggregate() const {
    std::vector<std::uint64_t> agg(static_cast<std::size_t>(bins), 0);
    for (const auto& row : counts)
        for (std::size_t b = 0; b < row.size(); ++b)
            agg[b] += row[b];
    return agg;
}

std::uint64_t LevelHistograms::total() const {
    std::uint64_t t = 0;
    for (const auto& row : counts)
        for (std::uint64_t c : row)
            t += c;
    return t;
}

LevelHistograms level_histogram(const std::vector<double>& equalized,
                                const std::vector<int>& tx_symbols, int bins, int m) {
    if (bins < 8)
        throw std::invalid_argument("level_histogram: need at least 8 bins");
    if (equalized.size() != tx_symbols.size())
        throw std::invalid_argument("level_histogram: stream length mismatch");
    LevelHistograms h;
    h.constellation = PamConstellation::pam(m);
    h.bins = bins;
    h.counts.assign(h.constellation.levels.size(),
                    std::vector<std::uint64_t>(static_cast<std::size_t>(bins), 0));
    const double scale = bins / (h.hi - h.lo);
    for (std::size_t i = 0; i < equalized.size(); ++i) {
        const int level_idx = h.constellation.level_index(tx_symbols[i]);
        int b = static_cast<int>(std::floor((equalized[i] - h.lo) * scale));
        b = std::clamp(b, 0, bins - 1); // out-of-range mass kept in the edge bins
        ++h.counts[static_cast<std::size_t>(level_idx)][static_cast<std::size_t>(b)];
    }
    return h;
}

double adjacent_overlap_mass(const LevelHistograms& h) {
    const std::uint64_t total = h.total();
    if (total == 0)
        return 0.0;
    std::uint64_t shared = 0;
    for (std::size_t lv = 0; lv + 1 < h.counts.size(); ++lv)
        for (std::size_t b = 0; b < h.counts[lv].size(); ++b)
            shared += std::min(h.counts[lv][b], h.counts[lv + 1][b]);
    return static_cast<double>(shared) / static_cast<double>(total);
}

double extinction_ratio_db(const Waveform& optical, const std::vector<int>& tx_symbols,
                           int oversample) {
    if (optical.unit != SignalUnit::milliwatts)
        throw std::invalid_argument("extinction_ratio_db: expected the optical (mW) waveform");
    const std::size_t os = static_cast<std::size_t>(oversample);
    if (optical.samples.size() < tx_symbols.size() * os)
        throw std::invalid_argument("extinction_ratio_db: waveform shorter than symbol stream");

    int peak = 0;
    for (int s : tx_symbols)
        peak = std::max(peak, std::abs(s));
    double p_top = 0.0, p_bot = 0.0;
    std::uint64_t n_top = 0, n_bot = 0;
    for (std::size_t i = 0; i < tx_symbols.size(); ++i) {
        const double p = optical.samples[i * os + os / 2];
        if (tx_symbols[i] == peak) {
            p_top += p;
            ++n_top;
        } else if (tx_symbols[i] == -peak) {
            p_bot += p;
            ++n_bot;
        }
    }
    if (n_top == 0 || n_bot == 0)
        throw std::runtime_error("extinction_ratio_db: outer levels absent from the stream");
    return 10.0 * std::log10((p_top / n_top) / (p_bot / n_bot));
}

void write_histogram_csv(const std::string& path, const LevelHistograms& h) {
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("write_histogram_csv: cannot open " + path);
    f << "level,bin_center,count\n";
    f.precision(10);
    for (std::size_t lv = 0; lv < h.counts.size(); ++lv)
        for (int b = 0; b < h.bins; ++b)
            f << h.constellation.levels[lv] << ',' << h.bin_center(b) << ','
              << h.counts[lv][static_cast<std::size_t>(b)] << '\n';
}

} // namespace pamsim
