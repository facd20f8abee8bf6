#include "pamsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "pamsim/filters.hpp"
#include "pamsim/rng.hpp"

namespace pamsim {

std::string to_string(SignalUnit u) {
    switch (u) {
    case SignalUnit::volts: return "volts";
    case SignalUnit::milliwatts: return "milliwatts";
    case SignalUnit::normalized: return "normalized";
    }
    return "?";
}

namespace {

void require_unit(const Waveform& wf, SignalUnit expected, const char* op) {
    if (wf.unit != expected)
        throw std::invalid_argument(std::string(op) + ": expected " + to_string(expected) +
                                    " input, got " + to_string(wf.unit));
}

} // namespace

void write_waveform_csv(const std::string& path, const Waveform& wf) {
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("write_waveform_csv: cannot open " + path);
    f << "# rate_GSaps=" << wf.rate_gsa << " unit=" << to_string(wf.unit) << '\n';
    f << "index,value\n";
    f.precision(12);
    for (std::size_t i = 0; i < wf.samples.size(); ++i)
        f << i << ',' << wf.samples[i] << '\n';
}

double EmlCurve::power_mw(double volts) const {
    if (!use_lookup())
        return p_max_mw * 0.5 * (1.0 + std::tanh(slope * (volts - v_infl)));

    // clamp outside the table; linear (monotone-preserving) interpolation inside
    if (volts <= lookup.front().first)
        return lookup.front().second;
    if (volts >= lookup.back().first)
        return lookup.back().second;
    auto it = std::upper_bound(lookup.begin(), lookup.end(), volts,
                               [](double v, const auto& p) { return v < p.first; });
    const auto& [v1, p1] = *it;
    const auto& [v0, p0] = *(it - 1);
    const double t = (volts - v0) / (v1 - v0);
    return p0 + t * (p1 - p0);
}

void EmlCurve::validate() const {
    if (use_lookup()) {
        for (std::size_t i = 0; i < lookup.size(); ++i) {
            if (lookup[i].second < 0.0)
                throw std::invalid_argument("EmlCurve: lookup powers must be non-negative");
            if (i > 0 && lookup[i].first <= lookup[i - 1].first)
                throw std::invalid_argument("EmlCurve: lookup voltages must be strictly increasing");
            if (i > 0 && lookup[i].second < lookup[i - 1].second)
                throw std::invalid_argument("EmlCurve: lookup powers must be non-decreasing");
        }
        return;
    }
    if (!(p_max_mw > 0.0) || !(slope > 0.0) || !std::isfinite(v_infl))
        throw std::invalid_argument("EmlCurve: need p_max > 0, slope > 0, finite v_infl");
}

EmlCurve EmlCurve::from_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("EmlCurve::from_csv: cannot open " + path);
    EmlCurve curve;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        if (line.rfind("voltage_V", 0) == 0)
            continue; // header
        std::istringstream row(line);
        double v = 0.0, p = 0.0;
        char comma = 0;
        if (!(row >> v >> comma >> p) || comma != ',')
            throw std::runtime_error("EmlCurve::from_csv: bad row '" + line + "'");
        curve.lookup.emplace_back(v, p);
    }
    if (curve.lookup.size() < 2)
        throw std::runtime_error("EmlCurve::from_csv: need at least two points");
    curve.validate();
    return curve;
}

void LinkConfig::validate() const {
    if (!(symbol_rate_gbd > 0.0))
        throw std::invalid_argument("LinkConfig: symbol_rate must be > 0");
    if (bits_per_symbol < 2 || bits_per_symbol > 8)
        throw std::invalid_argument("LinkConfig: bits_per_symbol must be in [2, 8]");
    if (oversample < 4 || (oversample % 2) != 0)
        throw std::invalid_argument("LinkConfig: oversample must be even and >= 4");
    if (!(dac_bw_ghz > 0.0) || !(eml_bw_ghz > 0.0) || !(rx_bw_ghz > 0.0))
        throw std::invalid_argument("LinkConfig: stage bandwidths must be > 0");
    if (dac_bits < 1 || dac_bits > 16)
        throw std::invalid_argument("LinkConfig: dac_bits must be in [1, 16]");
    if (vpp_dac_mv < 0.0)
        throw std::invalid_argument("LinkConfig: vpp_dac must be >= 0");
    if (!(pd_responsivity > 0.0))
        throw std::invalid_argument("LinkConfig: pd_responsivity must be > 0");
    if (rx_lpf_order < 2 || (rx_lpf_order % 2) != 0)
        throw std::invalid_argument("LinkConfig: rx_lpf_order must be even and >= 2");
    if (!(rx_lpf_cutoff > 0.0) || !(rx_lpf_cutoff * 2.0 < oversample))
        throw std::invalid_argument("LinkConfig: rx_lpf_cutoff out of range");
    eml.validate();
}

std::vector<int> map_gray_pam(const std::vector<std::uint8_t>& bits, int m) {
    if (m < 1 || m > 16)
        throw std::invalid_argument("map_gray_pam: bad m");
    if (bits.size() % static_cast<std::size_t>(m) != 0)
        throw std::invalid_argument("map_gray_pam: bit count not divisible by m");
    const int n = 1 << m;
    std::vector<int> symbols;
    symbols.reserve(bits.size() / static_cast<std::size_t>(m));
    for (std::size_t i = 0; i < bits.size(); i += static_cast<std::size_t>(m)) {
        unsigned gray = 0;
        for (int b = 0; b < m; ++b)
            gray = (gray << 1) | (bits[i + static_cast<std::size_t>(b)] & 1u);
        // Gray → rank in the reflected sequence = level index (ascending)
        unsigned idx = gray;
        for (unsigned shift = 1; shift < static_cast<unsigned>(m); shift <<= 1)
            idx ^= idx >> shift;
        symbols.push_back(2 * static_cast<int>(idx) - (n - 1));
    }
    return symbols;
}

std::vector<std::uint8_t> demap_gray_pam(const std::vector<int>& symbols, int m) {
    if (m < 1 || m > 16)
        throw std::invalid_argument("demap_gray_pam: bad m");
    const int n = 1 << m;
    std::vector<std::uint8_t> bits;
    bits.reserve(symbols.size() * static_cast<std::size_t>(m));
    for (int s : symbols) {
        const int idx = (s + (n - 1)) / 2;
        if (idx < 0 || idx >= n || 2 * idx - (n - 1) != s)
            throw std::invalid_argument("demap_gray_pam: not a constellation level");
        const unsigned gray = static_cast<unsigned>(idx) ^ (static_cast<unsigned>(idx) >> 1);
        for (int b = m - 1; b >= 0; --b)
            bits.push_back(static_cast<std::uint8_t>((gray >> b) & 1u));
    }
    return bits;
}

Waveform dac_frontend(const std::vector<int>& symbols, const LinkConfig& cfg) {
    cfg.validate();
    if (symbols.empty())
        throw std::invalid_argument("dac_frontend: empty symbol stream");
    const int alphabet_peak = (1 << cfg.bits_per_symbol) - 1;
    for (int s : symbols)
        if (std::abs(s) > alphabet_peak || (s % 2) == 0)
            throw std::invalid_argument("dac_frontend: symbol outside configured constellation");

    // full swing [−½, +½]; quantizer grid −½ + k/(2^bits − 1) includes both rails
    const double qsteps = static_cast<double>((1 << cfg.dac_bits) - 1);
    const std::size_t os = static_cast<std::size_t>(cfg.oversample);
    Waveform wf;
    wf.rate_gsa = cfg.sim_rate_gsa();
    wf.unit = SignalUnit::volts;
    wf.samples.resize(symbols.size() * os);
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        const double v = symbols[i] / (2.0 * alphabet_peak);
        const double q = std::round((v + 0.5) * qsteps) / qsteps - 0.5;
        for (std::size_t k = 0; k < os; ++k)
            wf.samples[i * os + k] = q;
    }

    if (!std::isinf(cfg.dac_bw_ghz))
        wf.samples = fir_filter_same(wf.samples, gaussian_lowpass_taps(cfg.dac_bw_ghz, wf.rate_gsa));
    return wf;
}

Waveform drive_voltage(const Waveform& wf, const LinkConfig& cfg) {
    require_unit(wf, SignalUnit::volts, "drive_voltage");
    const double swing = (cfg.vpp_dac_mv / 1000.0) * std::pow(10.0, cfg.ea_gain_db / 20.0);
    Waveform out = wf;
    for (double& v : out.samples)
        v = cfg.bias_v + swing * v;
    return out;
}

Waveform eml_transmit(const Waveform& wf, const LinkConfig& cfg) {
    require_unit(wf, SignalUnit::volts, "eml_transmit");
    Waveform out;
    out.rate_gsa = wf.rate_gsa;
    out.unit = SignalUnit::milliwatts;
    out.samples.resize(wf.samples.size());
    for (std::size_t i = 0; i < wf.samples.size(); ++i)
        out.samples[i] = cfg.eml.power_mw(wf.samples[i]);
    if (!std::isinf(cfg.eml_bw_ghz))
        out.samples = fir_filter_same(out.samples, gaussian_lowpass_taps(cfg.eml_bw_ghz, out.rate_gsa));
    return out;
}

double fiber_smallsignal(double theta, double beta) {
    return std::abs(std::sqrt(1.0 + beta * beta) * std::cos(theta + std::atan(beta)));
}

Waveform add_awgn(const Waveform& wf, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0))
        throw std::invalid_argument("add_awgn: sigma must be >= 0");
    Waveform out = wf;
    if (sigma == 0.0)
        return out;
    CounterRng rng(seed);
    for (double& v : out.samples)
        v += sigma * rng.gaussian();
    return out;
}

Waveform photodetect(const Waveform& wf, const LinkConfig& cfg, std::uint64_t seed) {
    require_unit(wf, SignalUnit::milliwatts, "photodetect");
    for (double p : wf.samples)
        if (p < 0.0)
            throw std::invalid_argument("photodetect: negative optical power");

    Waveform out;
    out.rate_gsa = wf.rate_gsa;
    out.unit = SignalUnit::normalized;
    out.samples.resize(wf.samples.size());
    double mean_current = 0.0;
    for (std::size_t i = 0; i < wf.samples.size(); ++i) {
        out.samples[i] = cfg.pd_responsivity * wf.samples[i];
        mean_current += out.samples[i];
    }
    mean_current /= static_cast<double>(out.samples.size());

    if (!std::isinf(cfg.snr_db)) {
        const double sigma = mean_current * std::pow(10.0, -cfg.snr_db / 20.0);
        out = add_awgn(out, sigma, seed);
    }
    if (!std::isinf(cfg.rx_bw_ghz))
        out.samples = fir_filter_same(out.samples, gaussian_lowpass_taps(cfg.rx_bw_ghz, out.rate_gsa));
    return out;
}

Waveform rx_frontend(const Waveform& wf, const LinkConfig& cfg) {
    require_unit(wf, SignalUnit::normalized, "rx_frontend");
    if ((cfg.oversample % 2) != 0)
        throw std::invalid_argument("rx_frontend: oversample must be even");
    const std::size_t os = static_cast<std::size_t>(cfg.oversample);
    if (wf.samples.size() % os != 0)
        throw std::invalid_argument("rx_frontend: length not a whole number of symbols");

    std::vector<double> x = wf.samples;
    double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    for (double& v : x)
        v -= mean;

    const double fc = cfg.rx_lpf_cutoff * cfg.symbol_rate_gbd;
    x = fir_filter_same(x, windowed_sinc_taps(cfg.rx_lpf_order, fc, wf.rate_gsa));

    // 2 sps, even phase on the symbol center k·os + os/2, odd on the edge
    const std::size_t n_sym = wf.samples.size() / os;
    std::vector<double> y(2 * n_sym, 0.0);
    for (std::size_t k = 0; k < n_sym; ++k) {
        y[2 * k] = x[k * os + os / 2];
        const std::size_t edge = (k + 1) * os;
        y[2 * k + 1] = (edge < x.size()) ? x[edge] : 0.0;
    }

    mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    double power = 0.0;
    for (double& v : y) {
        v -= mean;
        power += v * v;
    }
    const double rms = std::sqrt(power / static_cast<double>(y.size()));
    if (rms > 0.0)
        for (double& v : y)
            v /= rms;

    Waveform out;
    out.rate_gsa = 2.0 * cfg.symbol_rate_gbd;
    out.unit = SignalUnit::normalized;
    out.samples = std::move(y);
    return out;
}

} // namespace pamsim
