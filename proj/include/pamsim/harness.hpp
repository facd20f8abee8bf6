#ifndef PAMSIM_HARNESS_HPP
#define PAMSIM_HARNESS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pamsim/channel.hpp"
#include "pamsim/equalizer.hpp"
#include "pamsim/metrics.hpp"
#include "pamsim/shaping.hpp"

namespace pamsim {

struct DistributionSpec {
    enum class Kind { uniform, shaped };
    Kind kind = Kind::uniform;
    Polarity polarity = Polarity::cap;
    double alpha = 2.0;
    double ps_oh = 0.0817;

    ShapedDistribution realize(int m) const;
    std::string name() const; // "uniform", "cap_go2", "cup_go3.5", ...
};

enum class SweepAxis { none, vpp_dac, symbol_rate, alpha };

std::string to_string(SweepAxis axis);

struct ExperimentSpec {
    LinkConfig link;
    DistributionSpec distribution;
    // evaluated per trial on the same channel realization, in order
    std::vector<std::pair<std::string, EqualizerConfig>> equalizers;
    SweepAxis axis = SweepAxis::none;
    std::vector<double> grid;
    long trial_symbols = 200000;
    double fec_oh = 0.07;
    double ber_threshold = 0.0046; // HD-FEC at 7% OH
    int histogram_bins = 90;

    static ExperimentSpec defaults();
    void validate() const;
};

struct TrialOutput {
    std::string equalizer;
    TrialReport report;
};

// One end-to-end pass (shaping → channel → equalization → metrics) at the
// given sweep point (nullopt = the spec's own operating point). All
// configured equalizers see the same channel realization. Deterministic
// given (spec, point, seed).
std::vector<TrialOutput> run_trial(const ExperimentSpec& spec,
                                   std::optional<double> point, std::uint64_t seed);

struct SweepRow {
    double point = 0.0;
    std::string equalizer;
    std::optional<TrialReport> report; // absent on failure
    std::string error;
};

struct SweepTable {
    std::vector<SweepRow> rows; // grid-major, equalizer order within each point
};

// Per-point seeds derive from hash(link.seed, point index), so results are
// independent of execution order and of `threads`.
SweepTable run_sweep(const ExperimentSpec& spec, int threads = 1);

// CSV `vpp_mV,symbol_rate_GBd,format,equalizer,ber,air_Gbps,onbr_Gbps,er_dB`
// (onbr empty when absent); failed rows are skipped
void write_results_csv(const std::string& path, const ExperimentSpec& spec,
                       const SweepTable& table);

} // namespace pamsim

#endif
