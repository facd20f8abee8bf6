#ifndef PAMSIM_SHAPING_HPP
#define PAMSIM_SHAPING_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pamsim {

// Bipolar PAM alphabet {±1, ±3, ..., ±(2^m − 1)} in ascending order.
struct PamConstellation {
    int bits_per_symbol = 3;
    std::vector<int> levels;

    static PamConstellation pam(int m);

    int num_levels() const { return static_cast<int>(levels.size()); }
    int max_level() const { return levels.back(); }
    // index of a level in [0, 2^m); throws if not a constellation point
    int level_index(int level) const;
};

enum class Polarity { cap, cup };

// Maxwell-Boltzmann family P(x) ∝ exp(−ν·|x|^α) over a PAM alphabet.
// cap (ν ≥ 0) concentrates the inner levels, cup (ν < 0) the outer ones.
struct ShapedDistribution {
    PamConstellation constellation;
    std::vector<double> probabilities; // one per level, ascending level order
    double nu = 0.0;
    double alpha = 2.0;
    Polarity polarity = Polarity::cap;

    double probability_of(int level) const;
};

ShapedDistribution mb_pmf(double nu, double alpha, int m);

// uniform alphabet == mb_pmf(0, 2, m); named for readability at call sites
ShapedDistribution uniform_pam(int m);

// −Σ p·log2(p) in bits/symbol; zero-probability levels contribute nothing
double entropy(const ShapedDistribution& dist);

// Find ν (sign fixed by polarity) with entropy(mb_pmf(ν, α, m)) = target_entropy,
// by bisection on |ν| ∈ [0, 64]; entropy is strictly decreasing in |ν|.
// Converges to 1e−9 bits. target_entropy = m returns ν = 0 exactly.
double solve_nu(double target_entropy, double alpha, int m, Polarity polarity);

// i.i.d. inverse-CDF draws from the level PMF; deterministic given seed
std::vector<int> sample_symbols(const ShapedDistribution& dist, std::size_t n,
                                std::uint64_t seed);

// columns `level,probability`, levels ascending, 12 significant digits
void write_pmf_csv(std::ostream& out, const ShapedDistribution& dist);
void write_pmf_csv(const std::string& path, const ShapedDistribution& dist);

} // namespace pamsim

#endif
