#include "pamsim/shaping.hpp"
#include "pamsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pamsim {

PamConstellation PamConstellation::pam(int m) {
    if (m < 1 || m > 16)
        throw std::invalid_argument("PamConstellation: bits_per_symbol out of range");
    PamConstellation c;
    c.bits_per_symbol = m;
    const int n = 1 << m;
    c.levels.reserve(n);
    for (int i = 0; i < n; ++i)
        c.levels.push_back(2 * i - (n - 1));
    return c;
}

int PamConstellation::level_index(int level) const {
    const int n = num_levels();
    const int idx = (level + (n - 1)) / 2;
    if (idx < 0 || idx >= n || levels[static_cast<std::size_t>(idx)] != level)
        throw std::invalid_argument("PamConstellation: not a constellation level");
    return idx;
}

double ShapedDistribution::probability_of(int level) const {
    return probabilities[static_cast<std::size_t>(constellation.level_index(level))];
}

ShapedDistribution mb_pmf(double nu, double alpha, int m) {
    if (!std::isfinite(nu) || !std::isfinite(alpha) || alpha <= 0.0)
        throw std::invalid_argument("mb_pmf: nu must be finite and alpha > 0");
    if (m < 2 || m > 8)
        throw std::invalid_argument("mb_pmf: m must be in [2, 8]");

    ShapedDistribution d;
    d.constellation = PamConstellation::pam(m);
    d.nu = nu;
    d.alpha = alpha;
    d.polarity = (nu < 0.0) ? Polarity::cup : Polarity::cap;

    // exponents over the magnitudes only, then mirrored: symmetry is exact
    // by construction. Shift by the max exponent so extreme ν cannot
    // overflow; underflow to 0 at the far tail is acceptable (limit regime).
    const int half = 1 << (m - 1);
    std::vector<double> expo(static_cast<std::size_t>(half));
    double emax = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < half; ++k) {
        const double mag = 2.0 * k + 1.0;
        expo[static_cast<std::size_t>(k)] = -nu * std::pow(mag, alpha);
        emax = std::max(emax, expo[static_cast<std::size_t>(k)]);
    }
    std::vector<double> w(static_cast<std::size_t>(half));
    double sum = 0.0;
    for (int k = 0; k < half; ++k) {
        w[static_cast<std::size_t>(k)] = std::exp(expo[static_cast<std::size_t>(k)] - emax);
        sum += w[static_cast<std::size_t>(k)];
    }
    sum *= 2.0;

    d.probabilities.assign(d.constellation.levels.size(), 0.0);
    for (int k = 0; k < half; ++k) {
        const double p = w[static_cast<std::size_t>(k)] / sum;
        // levels are ordered −(2^m−1) ... +(2^m−1); magnitude 2k+1 sits at
        // indices half−1−k and half+k
        d.probabilities[static_cast<std::size_t>(half - 1 - k)] = p;
        d.probabilities[static_cast<std::size_t>(half + k)] = p;
    }
    return d;
}

ShapedDistribution uniform_pam(int m) { return mb_pmf(0.0, 2.0, m); }

double entropy(const ShapedDistribution& dist) {
    double h = 0.0;
    for (double p : dist.probabilities)
        if (p > 0.0)
            h -= p * std::log2(p);
    return h;
}

double solve_nu(double target_entropy, double alpha, int m, Polarity polarity) {
    if (!std::isfinite(target_entropy) || target_entropy <= 0.0 || target_entropy > m)
        throw std::domain_error("solve_nu: target entropy must be in (0, m]");
    if (target_entropy == static_cast<double>(m))
        return 0.0;

    const double sign = (polarity == Polarity::cap) ? 1.0 : -1.0;
    const double kTol = 1e-9;
    const double kNuMax = 64.0;

    auto entropy_at = [&](double nu_abs) { return entropy(mb_pmf(sign * nu_abs, alpha, m)); };

    if (entropy_at(kNuMax) > target_entropy)
        throw std::domain_error(
            "solve_nu: target entropy below the minimum reachable for this alphabet");

    double lo = 0.0, hi = kNuMax; // entropy(lo) > target ≥ entropy(hi)
    double mid = 0.0, h_mid = 0.0;
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        h_mid = entropy_at(mid);
        if (std::abs(h_mid - target_entropy) <= kTol)
            return sign * mid;
        (h_mid > target_entropy ? lo : hi) = mid;
    }
    throw std::runtime_error("solve_nu: bisection did not converge");
}

std::vector<int> sample_symbols(const ShapedDistribution& dist, std::size_t n,
                                std::uint64_t seed) {
    if (n < 1)
        throw std::invalid_argument("sample_symbols: n must be >= 1");
    const std::size_t k = dist.probabilities.size();
    std::vector<double> cdf(k);
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        acc += dist.probabilities[i];
        cdf[i] = acc;
    }
    cdf.back() = 1.0; // guard against rounding in the last bucket

    std::vector<int> symbols(n);
    CounterRng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform();
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const std::size_t idx = std::min<std::size_t>(
            static_cast<std::size_t>(it - cdf.begin()), k - 1);
        symbols[i] = dist.constellation.levels[idx];
    }
    return symbols;
}

void write_pmf_csv(std::ostream& out, const ShapedDistribution& dist) {
    out << "level,probability\n";
    std::ostringstream num;
    num.precision(12);
    for (std::size_t i = 0; i < dist.probabilities.size(); ++i) {
        num.str("");
        num << dist.probabilities[i];
        out << dist.constellation.levels[i] << ',' << num.str() << '\n';
    }
}

void write_pmf_csv(const std::string& path, const ShapedDistribution& dist) {
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("write_pmf_csv: cannot open " + path);
    write_pmf_csv(f, dist);
}

} // namespace pamsim
