#ifndef PAMSIM_EQUALIZER_HPP
#define PAMSIM_EQUALIZER_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "pamsim/channel.hpp"
#include "pamsim/shaping.hpp"

namespace pamsim {

// raised when the λ=0 normal equations are rank deficient
class SingularSystemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EqualizerConfig {
    int linear_taps = 31; // odd; T/2-spaced, centered on the decision sample
    int v2_memory = 0;    // symbols; 0 disables the 2nd-order kernel
    int v3_memory = 0;    // symbols; 0 disables the 3rd-order kernel
    int input_sps = 2;
    double ridge_lambda = 1e-6;
    int training_symbols = 20000;

    void validate() const;
    bool is_linear() const { return v2_memory == 0 && v3_memory == 0; }
    std::size_t feature_count() const;
};

// Feature-row layout shared by training and application, fixed so serialized
// kernels stay portable:
//   [0, L)                     linear  — rx sample at 2n + (j − (L−1)/2)
//   [L, L+P)                   2nd     — x(o(k1))·x(o(k2)), 0 ≤ k1 ≤ k2 < M2
//   [L+P, L+P+T)               3rd     — triple products,   0 ≤ k1 ≤ k2 ≤ k3 < M3
// with x(o) the rx sample at 2(n + o) and o(k) = k − (M−1)/2 the centered
// symbol offsets; pairs/triples enumerated lexicographically.
struct FeatureLayout {
    explicit FeatureLayout(const EqualizerConfig& cfg);

    std::size_t count() const { return count_; }
    std::size_t first_valid_symbol() const { return margin_front_; }
    // symbols with full context in an n_sym-symbol block: [first, last)
    std::size_t last_valid_symbol(std::size_t n_sym) const;

    // fill `row` (resized to count()); out-of-range samples read as 0
    void build_row(const std::vector<double>& rx2sps, std::ptrdiff_t symbol,
                   std::vector<double>& row) const;

    const EqualizerConfig& config() const { return cfg_; }

private:
    EqualizerConfig cfg_;
    std::vector<std::ptrdiff_t> linear_off_; // in 2-sps samples, relative to 2n
    std::vector<std::ptrdiff_t> v2_off_;     // symbol offsets o(k)
    std::vector<std::ptrdiff_t> v3_off_;
    std::size_t count_ = 0;
    std::size_t margin_front_ = 0;
};

// convenience mirror of FeatureLayout::build_row for a single symbol
std::vector<double> build_feature_row(const Waveform& rx, std::size_t symbol,
                                      const EqualizerConfig& cfg);

struct VolterraKernels {
    EqualizerConfig cfg;
    std::vector<double> weights; // [h1 | h2 | h3] in layout order

    double center_tap() const { return weights[static_cast<std::size_t>((cfg.linear_taps - 1) / 2)]; }
};

struct TrainResult {
    VolterraKernels kernels;
    double training_mse = 0.0;
    std::size_t rows = 0;
};

// Block ridge least squares: minimize Σ(w·φ(n) − target_n)² + λ‖w‖² over the
// first training_symbols symbols (edge symbols skipped). Targets are the
// known transmitted levels in the usual case; real-valued targets admit
// forward system identification. λ = 0 on a rank-deficient design raises
// SingularSystemError.
TrainResult train(const Waveform& rx, const std::vector<double>& targets,
                  const EqualizerConfig& cfg);
TrainResult train(const Waveform& rx, const std::vector<int>& known_symbols,
                  const EqualizerConfig& cfg);

struct EqualizedBlock {
    std::vector<double> y;    // one value per symbol
    std::size_t valid_begin = 0; // symbols outside [begin, end) lack full context
    std::size_t valid_end = 0;
};

EqualizedBlock apply(const VolterraKernels& kernels, const Waveform& rx);

// nearest-level slicing, thresholds at even midpoints; ties round away from
// zero (2.0 → 3), overflow clamps to the outer levels
int hard_decide_level(double value, const PamConstellation& constellation);
std::vector<int> hard_decide(const std::vector<double>& values,
                             const PamConstellation& constellation);

// CSV `order,lag1,lag2,lag3,value` (unused lags −1), preceded by a comment
// line carrying the config so files round-trip
void write_kernels_csv(const std::string& path, const VolterraKernels& kernels);
VolterraKernels read_kernels_csv(const std::string& path);

} // namespace pamsim

#endif
