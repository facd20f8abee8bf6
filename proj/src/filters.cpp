#include "pamsim/filters.hpp"

#include <cmath>
#include <stdexcept>

namespace pamsim {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

std::vector<double> gaussian_lowpass_taps(double f3db, double fs) {
    if (!(f3db > 0.0) || !(fs > 0.0))
        throw std::invalid_argument("gaussian_lowpass_taps: bandwidth and rate must be > 0");
    if (std::isinf(f3db))
        return {1.0};

    // |H(f)| = exp(−a·f²), a = ln2 / (2·f3db²)  ⇒  h(t) ∝ exp(−π²t²/a),
    // i.e. a Gaussian with σ_t = sqrt(ln2) / (2π·f3db); in samples:
    const double sigma = fs * std::sqrt(std::log(2.0)) / (2.0 * kPi * f3db);
    // truncate where exp(−k²/2σ²) < 1e−12  ⇒  k > σ·sqrt(2·ln(1e12))
    const int half = std::max(1, static_cast<int>(std::ceil(sigma * 7.434)));
    std::vector<double> taps(static_cast<std::size_t>(2 * half + 1));
    double sum = 0.0;
    for (int k = -half; k <= half; ++k) {
        const double v = std::exp(-0.5 * (k / sigma) * (k / sigma));
        taps[static_cast<std::size_t>(k + half)] = v;
        sum += v;
    }
    for (double& t : taps)
        t /= sum;
    return taps;
}

std::vector<double> windowed_sinc_taps(int order, double fc, double fs) {
    if (order < 2 || (order % 2) != 0)
        throw std::invalid_argument("windowed_sinc_taps: order must be even and >= 2");
    if (!(fc > 0.0) || !(fs > 0.0) || fc >= fs / 2.0)
        throw std::invalid_argument("windowed_sinc_taps: need 0 < fc < fs/2");

    const int n = order + 1;
    const int half = order / 2;
    const double fn = 2.0 * fc / fs; // cutoff as a fraction of Nyquist·2
    std::vector<double> taps(static_cast<std::size_t>(n));
    double sum = 0.0;
    for (int k = -half; k <= half; ++k) {
        const double sinc = (k == 0) ? fn : std::sin(kPi * fn * k) / (kPi * k);
        const double hamming = 0.54 + 0.46 * std::cos(kPi * k / half);
        const double v = sinc * hamming;
        taps[static_cast<std::size_t>(k + half)] = v;
        sum += v;
    }
    for (double& t : taps)
        t /= sum;
    return taps;
}

std::vector<double> fir_filter_same(const std::vector<double>& x,
                                    const std::vector<double>& taps) {
    if (taps.empty() || (taps.size() % 2) == 0)
        throw std::invalid_argument("fir_filter_same: taps must have odd length");
    if (taps.size() == 1) {
        std::vector<double> y(x);
        for (double& v : y)
            v *= taps[0];
        return y;
    }
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
    const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(taps.size() / 2);
    std::vector<double> y(x.size(), 0.0);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const std::ptrdiff_t k_lo = std::max<std::ptrdiff_t>(-half, -i);
        const std::ptrdiff_t k_hi = std::min<std::ptrdiff_t>(half, n - 1 - i);
        double acc = 0.0;
        for (std::ptrdiff_t k = k_lo; k <= k_hi; ++k)
            acc += taps[static_cast<std::size_t>(half + k)] * x[static_cast<std::size_t>(i + k)];
        y[static_cast<std::size_t>(i)] = acc;
    }
    return y;
}

std::complex<double> fir_response(const std::vector<double>& taps, double f, double fs) {
    std::complex<double> h(0.0, 0.0);
    for (std::size_t k = 0; k < taps.size(); ++k) {
        const double phase = -2.0 * kPi * f * static_cast<double>(k) / fs;
        h += taps[k] * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    return h;
}

} // namespace pamsim
