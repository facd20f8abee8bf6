#include "pamsim/channel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include "pamsim/filters.hpp"
#include "pamsim/metrics.hpp"
#include "test_util.hpp"

using namespace pamsim;

namespace {

LinkConfig noiseless_config() {
    LinkConfig cfg;
    cfg.snr_db = std::numeric_limits<double>::infinity();
    return cfg;
}

std::vector<int> prbs_symbols(std::size_t n, std::uint64_t seed) {
    return sample_symbols(uniform_pam(3), n, seed);
}

} // namespace

static void test_gray_mapping() {
    CHECK(map_gray_pam({0, 0, 0}, 3) == std::vector<int>{-7}, "000 maps to -7");
    CHECK(map_gray_pam({1, 1, 0}, 3) == std::vector<int>{1}, "110 maps to +1");
    CHECK(map_gray_pam({1, 0, 0}, 3) == std::vector<int>{7}, "100 maps to +7");

    // bijection over all 8 codes
    for (unsigned code = 0; code < 8; ++code) {
        const std::vector<std::uint8_t> bits = {static_cast<std::uint8_t>((code >> 2) & 1),
                                                static_cast<std::uint8_t>((code >> 1) & 1),
                                                static_cast<std::uint8_t>(code & 1)};
        CHECK(demap_gray_pam(map_gray_pam(bits, 3), 3) == bits, "demap(map(b)) == b");
    }

    // exhaustive adjacency: neighboring levels differ in exactly one bit
    const auto c = PamConstellation::pam(3);
    for (int i = 0; i + 1 < c.num_levels(); ++i) {
        const auto a = demap_gray_pam({c.levels[i]}, 3);
        const auto b = demap_gray_pam({c.levels[i + 1]}, 3);
        int diff = 0;
        for (std::size_t k = 0; k < a.size(); ++k)
            diff += (a[k] != b[k]);
        CHECK(diff == 1, "adjacent levels differ in exactly 1 bit");
    }

    CHECK_THROWS(map_gray_pam({0, 1}, 3), std::invalid_argument, "framing error");
    CHECK_THROWS(demap_gray_pam({2}, 3), std::invalid_argument, "non-level rejected");
}

static void test_dac_frontend() {
    // constant stream at a rail: exactly representable, unity DC gain
    {
        LinkConfig cfg = noiseless_config();
        cfg.dac_bw_ghz = std::numeric_limits<double>::infinity();
        const std::vector<int> symbols(256, 7);
        const auto wf = dac_frontend(symbols, cfg);
        CHECK(wf.unit == SignalUnit::volts, "DAC output in volts");
        CHECK(wf.samples.size() == symbols.size() * 8, "oversampled by 8");
        bool all_half = true;
        for (double v : wf.samples)
            all_half &= (v == 0.5);
        CHECK(all_half, "+7 rail is exactly +1/2");
    }
    // filtered constant passes through at unity DC gain (interior samples)
    {
        LinkConfig cfg = noiseless_config();
        const std::vector<int> symbols(512, 1);
        const auto wf = dac_frontend(symbols, cfg);
        const double q = std::round((1.0 / 14.0 + 0.5) * 255.0) / 255.0 - 0.5;
        for (std::size_t i = 200; i < wf.samples.size() - 200; i += 97)
            CHECK_NEAR(wf.samples[i], q, 1e-12, "unity DC gain through the DAC filter");
    }
    // 8-bit quantizer emits at most 256 distinct pre-filter values
    {
        LinkConfig cfg = noiseless_config();
        cfg.dac_bw_ghz = std::numeric_limits<double>::infinity();
        const auto wf = dac_frontend(prbs_symbols(20000, 5), cfg);
        std::set<double> distinct(wf.samples.begin(), wf.samples.end());
        CHECK(distinct.size() <= 256, "quantizer cardinality");
        CHECK(distinct.size() == 8, "PAM-8 uses 8 of the 256 codes");
    }
    // a tone at the 3-dB frequency comes out 3 dB down
    {
        const double fs = 800.0, f = 25.0;
        const auto taps = gaussian_lowpass_taps(f, fs);
        const std::size_t n = 4096;
        std::vector<double> cosine(n), sine(n);
        for (std::size_t k = 0; k < n; ++k) {
            cosine[k] = std::cos(2.0 * M_PI * f * k / fs);
            sine[k] = std::sin(2.0 * M_PI * f * k / fs);
        }
        const auto yc = fir_filter_same(cosine, taps);
        const auto ys = fir_filter_same(sine, taps);
        // projection over an interior window
        double ac = 0.0, as = 0.0;
        std::size_t count = 0;
        for (std::size_t k = 512; k < n - 512; ++k) {
            ac += yc[k] * cosine[k] * 2.0;
            as += ys[k] * sine[k] * 2.0;
            ++count;
        }
        const double gain_db = 20.0 * std::log10(0.5 * (ac + as) / static_cast<double>(count));
        CHECK_NEAR(gain_db, -20.0 * std::log10(std::sqrt(2.0)), 0.2, "-3 dB at f3db");
    }
    CHECK_THROWS(dac_frontend({3, 9}, noiseless_config()), std::invalid_argument,
                 "symbol outside the constellation");
}

static void test_drive_voltage() {
    LinkConfig cfg = noiseless_config();
    Waveform wf;
    wf.rate_gsa = cfg.sim_rate_gsa();
    wf.unit = SignalUnit::volts;
    wf.samples = {-0.5, 0.5, -0.5, 0.5};

    const auto out = drive_voltage(wf, cfg); // 290 mV, 22 dB
    const auto [lo, hi] = std::minmax_element(out.samples.begin(), out.samples.end());
    CHECK_NEAR(*hi - *lo, 3.65096, 1e-3, "Vpp^(DAC+EA) ~ 3.65 V");
    CHECK_NEAR(0.5 * (*hi + *lo), -3.1, 1e-12, "centered on the bias");

    cfg.vpp_dac_mv = 0.0;
    for (double v : drive_voltage(wf, cfg).samples)
        CHECK_NEAR(v, -3.1, 0.0, "vpp=0 gives the constant bias");

    cfg.vpp_dac_mv = 1000.0;
    cfg.ea_gain_db = 0.0;
    const auto unit_swing = drive_voltage(wf, cfg);
    const auto [l2, h2] = std::minmax_element(unit_swing.samples.begin(), unit_swing.samples.end());
    CHECK(*h2 - *l2 == 1.0, "1 V swing exactly at 0 dB gain");

    wf.unit = SignalUnit::milliwatts;
    CHECK_THROWS(drive_voltage(wf, cfg), std::invalid_argument, "unit discipline");
}

static void test_eml() {
    LinkConfig cfg = noiseless_config();
    cfg.eml_bw_ghz = std::numeric_limits<double>::infinity();

    Waveform wf;
    wf.rate_gsa = cfg.sim_rate_gsa();
    wf.unit = SignalUnit::volts;
    wf.samples.assign(64, -3.1);
    const auto mid = eml_transmit(wf, cfg);
    CHECK(mid.unit == SignalUnit::milliwatts, "EML output in mW");
    for (double p : mid.samples)
        CHECK_NEAR(p, 2.8, 1e-12, "half of p_max at the inflection point");

    wf.samples.assign(4, 1e3);
    CHECK_NEAR(eml_transmit(wf, cfg).samples[0], 5.6, 1e-9, "saturates at p_max");
    wf.samples.assign(4, -1e3);
    CHECK_NEAR(eml_transmit(wf, cfg).samples[0], 0.0, 1e-9, "cuts off at 0");

    // lookup curve: clamp outside, near-analytic inside
    EmlCurve table;
    for (int i = 0; i <= 200; ++i) {
        const double v = -6.0 + 0.03 * i;
        table.lookup.emplace_back(v, cfg.eml.power_mw(v));
    }
    LinkConfig lut_cfg = cfg;
    lut_cfg.eml = table;
    wf.samples = {-3.4567, -2.81, -9.0, 5.0};
    const auto lut_out = eml_transmit(wf, lut_cfg);
    CHECK_NEAR(lut_out.samples[0], cfg.eml.power_mw(-3.4567), 1e-4, "lookup interpolates");
    CHECK_NEAR(lut_out.samples[1], cfg.eml.power_mw(-2.81), 1e-4, "lookup interpolates");
    CHECK(lut_out.samples[2] == table.lookup.front().second, "clamps below the table");
    CHECK(lut_out.samples[3] == table.lookup.back().second, "clamps above the table");

    EmlCurve bad;
    bad.lookup = {{0.0, 1.0}, {0.0, 2.0}};
    CHECK_THROWS(bad.validate(), std::invalid_argument, "non-increasing voltages rejected");

    wf.unit = SignalUnit::normalized;
    CHECK_THROWS(eml_transmit(wf, cfg), std::invalid_argument, "unit discipline");
}

static void test_extinction_ratio_sweep() {
    // ER strictly increases with Vpp over the paper's sweep range
    const auto tx = prbs_symbols(3000, 21);
    double prev = -1e9;
    for (int vpp = 200; vpp <= 530; vpp += 30) {
        LinkConfig cfg = noiseless_config();
        cfg.vpp_dac_mv = vpp;
        Waveform v = dac_frontend(tx, cfg);
        v = drive_voltage(v, cfg);
        const Waveform optical = eml_transmit(v, cfg);
        const double er = extinction_ratio_db(optical, tx, cfg.oversample);
        CHECK(er > prev, "extinction ratio strictly increasing in Vpp");
        prev = er;
    }
}

static void test_fiber_smallsignal() {
    for (double theta : {0.0, 0.3, 1.0, 2.5})
        CHECK_NEAR(fiber_smallsignal(theta, 0.0), std::abs(std::cos(theta)), 1e-15,
                   "beta=0 reduces to |cos|");
    for (double beta : {-2.0, -0.5, 0.0, 0.7, 3.0})
        CHECK_NEAR(fiber_smallsignal(0.0, beta), 1.0, 1e-12, "theta=0 gives unity");
    CHECK_NEAR(fiber_smallsignal(M_PI / 4.0, 1.0), 0.0, 1e-12, "null at beta=1, theta=pi/4");
}

static void test_photodetect() {
    LinkConfig cfg = noiseless_config();
    cfg.rx_bw_ghz = std::numeric_limits<double>::infinity();

    Waveform optical;
    optical.rate_gsa = cfg.sim_rate_gsa();
    optical.unit = SignalUnit::milliwatts;
    optical.samples = {1.0, 2.0, 3.0, 2.0};
    const auto out = photodetect(optical, cfg, 1);
    CHECK(out.unit == SignalUnit::normalized, "PD output normalized unit");
    CHECK(out.samples == optical.samples, "identity with noise off and R=1");

    optical.samples[1] = -0.1;
    CHECK_THROWS(photodetect(optical, cfg, 1), std::invalid_argument, "negative power rejected");
    optical.samples[1] = 2.0;

    cfg.snr_db = 20.0;
    const auto n1 = photodetect(optical, cfg, 99);
    const auto n2 = photodetect(optical, cfg, 99);
    CHECK(n1.samples == n2.samples, "same seed, same noise");
    const auto n3 = photodetect(optical, cfg, 100);
    CHECK(n1.samples != n3.samples, "different seed, different noise");

    // configured sigma realized within 1% (1e6 samples)
    {
        Waveform zero;
        zero.rate_gsa = 1.0;
        zero.unit = SignalUnit::normalized;
        zero.samples.assign(1000000, 0.0);
        const double sigma = 0.37;
        const auto noisy = add_awgn(zero, sigma, 12345);
        double mean = 0.0;
        for (double v : noisy.samples)
            mean += v;
        mean /= static_cast<double>(noisy.samples.size());
        double var = 0.0;
        for (double v : noisy.samples)
            var += (v - mean) * (v - mean);
        var /= static_cast<double>(noisy.samples.size());
        CHECK_NEAR(var, sigma * sigma, 0.01 * sigma * sigma, "AWGN variance within 1%");
    }

    Waveform volts = optical;
    volts.unit = SignalUnit::volts;
    CHECK_THROWS(photodetect(volts, cfg, 1), std::invalid_argument, "unit discipline");
}

static void test_rx_frontend() {
    LinkConfig cfg;
    cfg.snr_db = 20.0;
    const auto tx = prbs_symbols(4000, 3);
    Waveform v = dac_frontend(tx, cfg);
    v = drive_voltage(v, cfg);
    const auto rx = rx_frontend(photodetect(eml_transmit(v, cfg), cfg, 17), cfg);

    CHECK(rx.samples.size() == 2 * tx.size(), "2 samples per symbol out");
    CHECK_NEAR(rx.rate_gsa, 2.0 * cfg.symbol_rate_gbd, 1e-12, "output rate is 2x baud");
    double mean = 0.0, power = 0.0;
    for (double s : rx.samples)
        mean += s;
    mean /= static_cast<double>(rx.samples.size());
    for (double s : rx.samples)
        power += s * s;
    const double rms = std::sqrt(power / static_cast<double>(rx.samples.size()));
    CHECK_NEAR(mean, 0.0, 1e-12, "DC removed");
    CHECK_NEAR(rms, 1.0, 1e-12, "unit RMS");

    LinkConfig odd = cfg;
    odd.oversample = 5;
    CHECK_THROWS(dac_frontend(tx, odd), std::invalid_argument, "odd oversample rejected");
}

static void test_level_ordering() {
    // with generous bandwidths and a quasi-linear drive, the noiseless
    // decision samples separate cleanly by transmitted level
    LinkConfig cfg = noiseless_config();
    cfg.dac_bw_ghz = 200.0;
    cfg.eml_bw_ghz = 500.0;
    cfg.rx_bw_ghz = 500.0;
    cfg.vpp_dac_mv = 150.0;
    const auto tx = prbs_symbols(2000, 9);
    Waveform v = dac_frontend(tx, cfg);
    v = drive_voltage(v, cfg);
    const auto rx = rx_frontend(photodetect(eml_transmit(v, cfg), cfg, 1), cfg);

    std::array<double, 8> lo{}, hi{};
    lo.fill(1e9);
    hi.fill(-1e9);
    const auto c = PamConstellation::pam(3);
    for (std::size_t n = 50; n + 50 < tx.size(); ++n) {
        const auto idx = static_cast<std::size_t>(c.level_index(tx[n]));
        const double s = rx.samples[2 * n];
        lo[idx] = std::min(lo[idx], s);
        hi[idx] = std::max(hi[idx], s);
    }
    for (int i = 0; i + 1 < 8; ++i)
        CHECK(hi[static_cast<std::size_t>(i)] < lo[static_cast<std::size_t>(i + 1)],
              "noiseless symbol centers strictly ordered by level");
}

static void test_quasilinear_thd() {
    // |v − v_infl| <= 0.2/slope keeps total harmonic distortion under 1%
    LinkConfig cfg = noiseless_config();
    cfg.eml_bw_ghz = std::numeric_limits<double>::infinity();
    cfg.rx_bw_ghz = std::numeric_limits<double>::infinity();
    const double amplitude = 0.2 / cfg.eml.slope;
    const double fs = 800.0, f = 5.0;
    const std::size_t n = 16000;
    Waveform v;
    v.rate_gsa = fs;
    v.unit = SignalUnit::volts;
    v.samples.resize(n);
    for (std::size_t k = 0; k < n; ++k)
        v.samples[k] = cfg.eml.v_infl + amplitude * std::sin(2.0 * M_PI * f * k / fs);
    const auto out = photodetect(eml_transmit(v, cfg), cfg, 1);

    auto harmonic = [&](int h) {
        double ac = 0.0, as = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            ac += out.samples[k] * std::cos(2.0 * M_PI * h * f * k / fs);
            as += out.samples[k] * std::sin(2.0 * M_PI * h * f * k / fs);
        }
        return 2.0 * std::hypot(ac, as) / static_cast<double>(n);
    };
    const double fundamental = harmonic(1);
    double distortion = 0.0;
    for (int h = 2; h <= 6; ++h)
        distortion += harmonic(h) * harmonic(h);
    CHECK(std::sqrt(distortion) / fundamental < 0.01, "THD < 1% in the quasi-linear region");
}

static void test_csv_io() {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "pamsim_channel_test";
    fs::create_directories(dir);

    // EML lookup round-trip
    {
        const auto path = (dir / "curve.csv").string();
        std::ofstream f(path);
        f << "voltage_V,power_mW\n-6.0,0.1\n-3.0,2.8\n0.0,5.5\n";
        f.close();
        const auto curve = EmlCurve::from_csv(path);
        CHECK(curve.lookup.size() == 3, "lookup rows parsed");
        CHECK_NEAR(curve.power_mw(-4.5), 1.45, 1e-12, "interpolated midpoint");
    }
    // waveform dump header
    {
        const auto path = (dir / "wf.csv").string();
        Waveform wf;
        wf.rate_gsa = 800.0;
        wf.unit = SignalUnit::milliwatts;
        wf.samples = {1.25, 2.5};
        write_waveform_csv(path, wf);
        std::ifstream f(path);
        std::string l0, l1, l2;
        std::getline(f, l0);
        std::getline(f, l1);
        std::getline(f, l2);
        CHECK(l0 == "# rate_GSaps=800 unit=milliwatts", "waveform dump header");
        CHECK(l1 == "index,value", "waveform dump columns");
        CHECK(l2 == "0,1.25", "waveform dump first row");
    }
    fs::remove_all(dir);
}

int main() {
    test_gray_mapping();
    test_dac_frontend();
    test_drive_voltage();
    test_eml();
    test_extinction_ratio_sweep();
    test_fiber_smallsignal();
    test_photodetect();
    test_rx_frontend();
    test_level_ordering();
    test_quasilinear_thd();
    test_csv_io();
    return testutil::summary("channel");
}
