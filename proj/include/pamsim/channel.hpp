#ifndef PAMSIM_CHANNEL_HPP
#define PAMSIM_CHANNEL_HPP

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "pamsim/shaping.hpp"

namespace pamsim {

enum class SignalUnit { volts, milliwatts, normalized };

std::string to_string(SignalUnit u);

// Uniformly sampled real-valued signal. Units move strictly
// volts → milliwatts → normalized along the pipeline.
struct Waveform {
    std::vector<double> samples;
    double rate_gsa = 0.0; // GSa/s
    SignalUnit unit = SignalUnit::normalized;

    std::size_t size() const { return samples.size(); }
};

// dump as CSV `index,value` preceded by `# rate_GSaps=<r> unit=<u>`
void write_waveform_csv(const std::string& path, const Waveform& wf);

// Static electro-absorption modulator transfer: drive voltage → optical power.
// Analytic model T(v) = ½(1 + tanh(slope·(v − v_infl))), P = p_max·T(v);
// a measured lookup table (strictly increasing voltages, non-decreasing
// powers) takes precedence when present, clamped at its endpoints.
struct EmlCurve {
    double v_infl = -3.1;  // V, inflection point = bias point
    double slope = 0.5;    // 1/V
    double p_max_mw = 5.6; // mW, saturated output

    std::vector<std::pair<double, double>> lookup; // (voltage V, power mW)

    bool use_lookup() const { return !lookup.empty(); }
    double power_mw(double volts) const;
    void validate() const;

    // CSV `voltage_V,power_mW`, strictly increasing voltages
    static EmlCurve from_csv(const std::string& path);
};

struct LinkConfig {
    double symbol_rate_gbd = 100.0;
    int bits_per_symbol = 3; // PAM order m
    int oversample = 8;      // simulation samples/symbol, even, >= 4
    double dac_bw_ghz = 25.0;
    int dac_bits = 8;
    double vpp_dac_mv = 290.0;
    double ea_gain_db = 22.0;
    double bias_v = -3.1;
    EmlCurve eml;
    double eml_bw_ghz = 55.0;
    double rx_bw_ghz = 65.0; // PD + EA + DSO folded into one analog stage
    double pd_responsivity = 1.0;
    // electrical SNR at the detector, referenced to the mean photocurrent
    // power (Vpp-invariant at inflection biasing); +inf disables noise.
    // 27 dB puts uniform PAM-8 with FFE near BER 1e-2 at its best drive.
    double snr_db = 27.0;
    int rx_lpf_order = 30;
    double rx_lpf_cutoff = 0.75; // fraction of symbol rate
    std::uint64_t seed = 1;

    double sim_rate_gsa() const { return symbol_rate_gbd * oversample; }
    void validate() const;
};

// m-bit groups (MSB first) → levels via reflected binary Gray code,
// codes in Gray-sequence order assigned to levels ascending:
// 000→−7, 001→−5, 011→−3, 010→−1, 110→+1, 111→+3, 101→+5, 100→+7 (m = 3).
std::vector<int> map_gray_pam(const std::vector<std::uint8_t>& bits, int m);
std::vector<std::uint8_t> demap_gray_pam(const std::vector<int>& symbols, int m);

// symbols → volts-domain waveform at the simulation rate:
// scale to [−½, +½], quantize to 2^dac_bits codes, sample-and-hold
// upsample, Gaussian low-pass at dac_bw_ghz (unity DC gain)
Waveform dac_frontend(const std::vector<int>& symbols, const LinkConfig& cfg);

// v(t) = bias + (vpp_dac/1000)·10^(ea_gain/20)·wf(t)
Waveform drive_voltage(const Waveform& wf, const LinkConfig& cfg);

// static EML curve pointwise, then optional low-pass at eml_bw_ghz
Waveform eml_transmit(const Waveform& wf, const LinkConfig& cfg);

// |sqrt(1+β²)·cos(θ + arctan β)|: small-signal magnitude of the
// chirped-modulator/dispersive-fiber interaction; standalone, not part of
// the back-to-back chain
double fiber_smallsignal(double theta, double beta);

// white Gaussian noise of the given std dev, deterministic per seed
Waveform add_awgn(const Waveform& wf, double sigma, std::uint64_t seed);

// photocurrent R·P + AWGN (σ from snr_db vs mean photocurrent power),
// then the composite receive analog low-pass at rx_bw_ghz
Waveform photodetect(const Waveform& wf, const LinkConfig& cfg, std::uint64_t seed);

// DC removal, FIR low-pass (rx_lpf_order, rx_lpf_cutoff·symbol_rate),
// decimation to 2 samples/symbol with the even phase on symbol centers,
// then exact zero-mean / unit-RMS normalization
Waveform rx_frontend(const Waveform& wf, const LinkConfig& cfg);

} // namespace pamsim

#endif
