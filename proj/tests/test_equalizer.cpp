#include "pamsim/equalizer.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "pamsim/rng.hpp"
#include "test_util.hpp"

using namespace pamsim;

namespace {

Waveform wrap2sps(std::vector<double> samples) {
    Waveform wf;
    wf.rate_gsa = 200.0;
    wf.unit = SignalUnit::normalized;
    wf.samples = std::move(samples);
    return wf;
}

// symbols at 2 sps with zero-interpolated odd samples
Waveform symbols_at_2sps(const std::vector<int>& symbols) {
    std::vector<double> s(2 * symbols.size(), 0.0);
    for (std::size_t n = 0; n < symbols.size(); ++n)
        s[2 * n] = symbols[n];
    return wrap2sps(std::move(s));
}

double evaluate_mse(const EqualizedBlock& eq, const std::vector<double>& targets,
                    std::size_t begin, std::size_t end) {
    double sse = 0.0;
    for (std::size_t n = begin; n < end; ++n) {
        const double e = eq.y[n] - targets[n];
        sse += e * e;
    }
    return sse / static_cast<double>(end - begin);
}

} // namespace

static void test_feature_rows() {
    EqualizerConfig ffe;
    ffe.linear_taps = 31;
    CHECK(ffe.feature_count() == 31, "FFE row length equals linear_taps");

    EqualizerConfig vnle = ffe;
    vnle.v2_memory = 7;
    vnle.v3_memory = 9;
    CHECK(vnle.feature_count() == 224, "31 + C(8,2) + C(11,3) = 224");

    Waveform zeros = wrap2sps(std::vector<double>(128, 0.0));
    const auto row = build_feature_row(zeros, 32, vnle);
    CHECK(row.size() == 224, "built row has layout length");
    bool all_zero = true;
    for (double v : row)
        all_zero &= (v == 0.0);
    CHECK(all_zero, "all-zero input gives an all-zero row");

    CHECK_THROWS(build_feature_row(zeros, 2, vnle), std::out_of_range, "edge symbol rejected");

    EqualizerConfig bad = ffe;
    bad.linear_taps = 30;
    CHECK_THROWS(bad.validate(), std::invalid_argument, "even tap count rejected");
}

static void test_identity_channel() {
    const auto symbols = sample_symbols(uniform_pam(3), 4000, 77);
    const auto rx = symbols_at_2sps(symbols);

    // zero-interpolated odd samples leave zero columns in the design, so the
    // default ridge carries the fit (lambda = 0 is exercised below)
    EqualizerConfig cfg;
    cfg.linear_taps = 31;
    cfg.ridge_lambda = 1e-6;
    cfg.training_symbols = 2000;

    const auto fit = train(rx, symbols, cfg);
    CHECK(fit.training_mse < 1e-12, "perfect linear fit on the identity channel");
    CHECK_NEAR(fit.kernels.center_tap(), 1.0, 1e-6, "center tap is 1");

    const auto eq = apply(fit.kernels, rx);
    const auto decided = hard_decide(
        std::vector<double>(eq.y.begin() + 2000, eq.y.begin() + static_cast<std::ptrdiff_t>(eq.valid_end)),
        PamConstellation::pam(3));
    std::size_t errors = 0;
    for (std::size_t n = 0; n < decided.size(); ++n)
        errors += (decided[n] != symbols[2000 + n]);
    CHECK(errors == 0, "zero errors on held-out identity block");
}

static void test_unit_impulse_kernel() {
    VolterraKernels kernels;
    kernels.cfg.linear_taps = 31;
    kernels.cfg.v2_memory = 0;
    kernels.cfg.v3_memory = 0;
    kernels.weights.assign(31, 0.0);
    kernels.weights[15] = 1.0;

    std::vector<double> samples(512);
    CounterRng rng(5);
    for (double& s : samples)
        s = rng.uniform() - 0.5;
    const auto rx = wrap2sps(samples);
    const auto eq = apply(kernels, rx);
    bool match = true;
    for (std::size_t n = eq.valid_begin; n < eq.valid_end; ++n)
        match &= (eq.y[n] == samples[2 * n]);
    CHECK(match, "unit center tap passes even-phase samples through");

    kernels.weights.pop_back();
    CHECK_THROWS(apply(kernels, rx), std::invalid_argument, "kernel/config shape error");
}

static void test_planted_volterra_forward() {
    // forward system identification: targets are an exact Volterra functional
    // of the input, so the fit must reproduce the channel output
    const auto symbols = sample_symbols(uniform_pam(3), 6000, 13);
    std::vector<double> samples(2 * symbols.size());
    CounterRng dither(3);
    for (std::size_t n = 0; n < symbols.size(); ++n) {
        samples[2 * n] = symbols[n];
        samples[2 * n + 1] = dither.gaussian(); // keeps the lambda=0 design full rank
    }
    const auto rx = wrap2sps(std::move(samples));
    std::vector<double> channel_out(symbols.size(), 0.0);
    for (std::size_t n = 0; n < symbols.size(); ++n) {
        const double x0 = symbols[n];
        const double x1 = (n >= 1) ? symbols[n - 1] : 0.0;
        channel_out[n] = 0.9 * x0 + 0.2 * x1 + 0.1 * x0 * x0 - 0.05 * x0 * x0 * x0;
    }

    EqualizerConfig cfg;
    cfg.linear_taps = 31;
    cfg.v2_memory = 7;
    cfg.v3_memory = 9;
    cfg.ridge_lambda = 0.0;
    cfg.training_symbols = 3000;

    const auto fit = train(rx, channel_out, cfg);
    CHECK(fit.training_mse < 1e-10, "planted kernels recovered: training MSE < 1e-10");

    const auto eq = apply(fit.kernels, rx);
    const double held_out = evaluate_mse(eq, channel_out, 3000, eq.valid_end);
    CHECK(held_out < 1e-10, "planted kernels reproduce the channel on held-out data");
}

static void test_planted_volterra_inverse() {
    // equalization direction over an invertible nonlinear channel: decisions
    // after training must be error-free without noise
    const auto symbols = sample_symbols(uniform_pam(3), 8000, 29);
    std::vector<double> received(2 * symbols.size(), 0.0);
    CounterRng dither(5);
    for (std::size_t n = 0; n < symbols.size(); ++n) {
        const double x0 = symbols[n];
        const double x1 = (n >= 1) ? symbols[n - 1] : 0.0;
        received[2 * n] = x0 + 0.2 * x1 + 0.02 * x0 * x0 - 0.002 * x0 * x0 * x0;
        received[2 * n + 1] = 0.5 * dither.gaussian();
    }
    const auto rx = wrap2sps(std::move(received));

    EqualizerConfig cfg;
    cfg.linear_taps = 31;
    cfg.v2_memory = 7;
    cfg.v3_memory = 9;
    cfg.ridge_lambda = 0.0;
    cfg.training_symbols = 4000;

    const auto fit = train(rx, symbols, cfg);
    const auto eq = apply(fit.kernels, rx);
    const auto decided = hard_decide(
        std::vector<double>(eq.y.begin() + 4000, eq.y.begin() + static_cast<std::ptrdiff_t>(eq.valid_end)),
        PamConstellation::pam(3));
    std::size_t errors = 0;
    for (std::size_t n = 0; n < decided.size(); ++n)
        errors += (decided[n] != symbols[4000 + n]);
    CHECK(errors == 0, "noiseless VNLE decisions are error-free");
}

static void test_degenerate_vnle_is_ffe() {
    const auto symbols = sample_symbols(uniform_pam(3), 4000, 31);
    std::vector<double> received(2 * symbols.size(), 0.0);
    CounterRng rng(8);
    for (std::size_t n = 0; n < symbols.size(); ++n) {
        const double x1 = (n >= 1) ? symbols[n - 1] : 0.0;
        received[2 * n] = symbols[n] + 0.3 * x1 + 0.05 * rng.gaussian();
        received[2 * n + 1] = 0.1 * rng.gaussian();
    }
    const auto rx = wrap2sps(std::move(received));

    EqualizerConfig ffe;
    ffe.linear_taps = 21;
    ffe.ridge_lambda = 1e-8;
    ffe.training_symbols = 2000;
    EqualizerConfig vnle_zero = ffe;
    vnle_zero.v2_memory = 0;
    vnle_zero.v3_memory = 0;

    const auto fit_ffe = train(rx, symbols, ffe);
    const auto fit_vnle = train(rx, symbols, vnle_zero);
    CHECK(fit_ffe.kernels.weights == fit_vnle.kernels.weights,
          "zero nonlinear memories reduce VNLE to FFE");
    CHECK(apply(fit_ffe.kernels, rx).y == apply(fit_vnle.kernels, rx).y,
          "outputs bit-identical");
}

static void test_monotone_benefit_and_orthogonality() {
    // noisy channel: nested model classes and LS residual orthogonality
    const auto symbols = sample_symbols(uniform_pam(3), 6000, 37);
    std::vector<double> received(2 * symbols.size(), 0.0);
    CounterRng rng(21);
    for (std::size_t n = 0; n < symbols.size(); ++n) {
        const double x0 = symbols[n];
        const double x1 = (n >= 1) ? symbols[n - 1] : 0.0;
        received[2 * n] = x0 + 0.25 * x1 + 0.03 * x0 * x0 + 0.4 * rng.gaussian();
        received[2 * n + 1] = 0.2 * rng.gaussian();
    }
    const auto rx = wrap2sps(std::move(received));

    EqualizerConfig ffe;
    ffe.linear_taps = 15;
    ffe.ridge_lambda = 0.0;
    ffe.training_symbols = 4000;
    EqualizerConfig vnle = ffe;
    vnle.v2_memory = 5;
    vnle.v3_memory = 3;

    const auto fit_ffe = train(rx, symbols, ffe);
    const auto fit_vnle = train(rx, symbols, vnle);
    CHECK(fit_vnle.training_mse <= fit_ffe.training_mse + 1e-12,
          "VNLE training MSE never exceeds FFE (nested models)");

    // residuals orthogonal to every feature column at lambda = 0
    FeatureLayout layout(vnle);
    const auto eq = apply(fit_vnle.kernels, rx);
    std::vector<double> row;
    std::vector<double> dots(layout.count(), 0.0), norms(layout.count(), 0.0);
    double res_norm = 0.0;
    for (std::size_t n = layout.first_valid_symbol(); n < 4000; ++n) {
        layout.build_row(rx.samples, static_cast<std::ptrdiff_t>(n), row);
        const double r = eq.y[n] - symbols[n];
        res_norm += r * r;
        for (std::size_t j = 0; j < row.size(); ++j) {
            dots[j] += r * row[j];
            norms[j] += row[j] * row[j];
        }
    }
    double worst = 0.0;
    for (std::size_t j = 0; j < dots.size(); ++j)
        worst = std::max(worst, std::abs(dots[j]) / (std::sqrt(res_norm) * std::sqrt(norms[j])));
    CHECK(worst < 1e-8, "residuals orthogonal to the feature columns");
}

static void test_singular_system() {
    const auto symbols = sample_symbols(uniform_pam(3), 4000, 41);
    const auto rx = symbols_at_2sps(symbols);

    EqualizerConfig cfg;
    cfg.linear_taps = 31;
    cfg.v2_memory = 7;
    cfg.v3_memory = 9;
    cfg.ridge_lambda = 0.0;
    cfg.training_symbols = 100; // far below the 224 free coefficients

    CHECK_THROWS(train(rx, symbols, cfg), SingularSystemError,
                 "underdetermined fit raises the singular-system error");

    cfg.ridge_lambda = 1e-3;
    const auto fit = train(rx, symbols, cfg); // regularized: solvable
    CHECK(fit.kernels.weights.size() == 224, "ridge rescues the underdetermined fit");
}

static void test_hard_decide() {
    const auto c = PamConstellation::pam(3);
    CHECK(hard_decide_level(0.99, c) == 1, "0.99 slices to 1");
    CHECK(hard_decide_level(2.0, c) == 3, "tie at 2.0 rounds away from zero");
    CHECK(hard_decide_level(-2.0, c) == -3, "tie at -2.0 rounds away from zero");
    CHECK(hard_decide_level(9.3, c) == 7, "clamps above the top level");
    CHECK(hard_decide_level(-11.0, c) == -7, "clamps below the bottom level");
    CHECK(hard_decide_level(0.0, c) == 1, "zero slices to +1 by convention");
    CHECK(hard_decide_level(5.999, c) == 5, "below threshold stays");
}

static void test_kernel_csv() {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "pamsim_eq_test";
    fs::create_directories(dir);
    const auto path = (dir / "kernels.csv").string();

    VolterraKernels kernels;
    kernels.cfg.linear_taps = 5;
    kernels.cfg.v2_memory = 3;
    kernels.cfg.v3_memory = 2;
    kernels.weights.resize(kernels.cfg.feature_count());
    for (std::size_t i = 0; i < kernels.weights.size(); ++i)
        kernels.weights[i] = 0.1 * static_cast<double>(i + 1) - 0.7;

    write_kernels_csv(path, kernels);
    const auto loaded = read_kernels_csv(path);
    CHECK(loaded.cfg.linear_taps == 5 && loaded.cfg.v2_memory == 3 && loaded.cfg.v3_memory == 2,
          "kernel CSV round-trips the config");
    bool equal = loaded.weights.size() == kernels.weights.size();
    for (std::size_t i = 0; equal && i < kernels.weights.size(); ++i)
        equal = std::abs(loaded.weights[i] - kernels.weights[i]) < 1e-14;
    CHECK(equal, "kernel CSV round-trips the weights");

    std::ifstream f(path);
    std::string l0, l1, l2;
    std::getline(f, l0);
    std::getline(f, l1);
    std::getline(f, l2);
    CHECK(l1 == "order,lag1,lag2,lag3,value", "kernel CSV columns");
    CHECK(l2.rfind("1,-2,-1,-1,", 0) == 0, "linear rows carry -1 for unused lags");
    fs::remove_all(dir);
}

int main() {
    test_feature_rows();
    test_identity_channel();
    test_unit_impulse_kernel();
    test_planted_volterra_forward();
    test_planted_volterra_inverse();
    test_degenerate_vnle_is_ffe();
    test_monotone_benefit_and_orthogonality();
    test_singular_system();
    test_hard_decide();
    test_kernel_csv();
    return testutil::summary("equalizer");
}
