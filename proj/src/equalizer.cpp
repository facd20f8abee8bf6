#include "pamsim/equalizer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Dense>

namespace pamsim {

void EqualizerConfig::validate() const {
    if (linear_taps < 1 || (linear_taps % 2) == 0)
        throw std::invalid_argument("EqualizerConfig: linear_taps must be odd and >= 1");
    if (v2_memory < 0 || v3_memory < 0)
        throw std::invalid_argument("EqualizerConfig: memories must be >= 0");
    if (input_sps != 2)
        throw std::invalid_argument("EqualizerConfig: input_sps must be 2");
    if (ridge_lambda < 0.0)
        throw std::invalid_argument("EqualizerConfig: ridge_lambda must be >= 0");
    if (training_symbols < 1)
        throw std::invalid_argument("EqualizerConfig: training_symbols must be >= 1");
}

std::size_t EqualizerConfig::feature_count() const {
    const std::size_t l = static_cast<std::size_t>(linear_taps);
    const std::size_t m2 = static_cast<std::size_t>(v2_memory);
    const std::size_t m3 = static_cast<std::size_t>(v3_memory);
    return l + m2 * (m2 + 1) / 2 + m3 * (m3 + 1) * (m3 + 2) / 6;
}

FeatureLayout::FeatureLayout(const EqualizerConfig& cfg) : cfg_(cfg) {
    cfg.validate();
    const int half = (cfg.linear_taps - 1) / 2;
    linear_off_.reserve(static_cast<std::size_t>(cfg.linear_taps));
    for (int j = -half; j <= half; ++j)
        linear_off_.push_back(j);

    auto centered = [](int memory) {
        std::vector<std::ptrdiff_t> offs;
        offs.reserve(static_cast<std::size_t>(memory));
        for (int k = 0; k < memory; ++k)
            offs.push_back(k - (memory - 1) / 2);
        return offs;
    };
    v2_off_ = centered(cfg.v2_memory);
    v3_off_ = centered(cfg.v3_memory);
    count_ = cfg.feature_count();

    // tightest front margin with all sample indices in range: 2n − half ≥ 0
    // plus the most negative symbol offset of the nonlinear windows
    std::ptrdiff_t front = (half + 1) / 2;
    for (auto offs : {&v2_off_, &v3_off_})
        if (!offs->empty())
            front = std::max(front, -offs->front());
    margin_front_ = static_cast<std::size_t>(front);
}

std::size_t FeatureLayout::last_valid_symbol(std::size_t n_sym) const {
    // linear window needs 2n + half <= 2·n_sym − 1; the nonlinear windows
    // need n + max offset <= n_sym − 1
    const std::ptrdiff_t half = (cfg_.linear_taps - 1) / 2;
    std::ptrdiff_t last = static_cast<std::ptrdiff_t>(n_sym); // exclusive
    last = std::min(last, (static_cast<std::ptrdiff_t>(2 * n_sym) - 1 - half) / 2 + 1);
    if (!v2_off_.empty())
        last = std::min(last, static_cast<std::ptrdiff_t>(n_sym) - v2_off_.back());
    if (!v3_off_.empty())
        last = std::min(last, static_cast<std::ptrdiff_t>(n_sym) - v3_off_.back());
    return static_cast<std::size_t>(std::max<std::ptrdiff_t>(last, 0));
}

void FeatureLayout::build_row(const std::vector<double>& rx, std::ptrdiff_t symbol,
                              std::vector<double>& row) const {
    row.resize(count_);
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(rx.size());
    auto sample = [&](std::ptrdiff_t idx) -> double {
        return (idx >= 0 && idx < n) ? rx[static_cast<std::size_t>(idx)] : 0.0;
    };

    std::size_t w = 0;
    const std::ptrdiff_t center = 2 * symbol;
    for (std::ptrdiff_t off : linear_off_)
        row[w++] = sample(center + off);

    if (!v2_off_.empty()) {
        const std::size_t m2 = v2_off_.size();
        std::vector<double> x2(m2);
        for (std::size_t k = 0; k < m2; ++k)
            x2[k] = sample(2 * (symbol + v2_off_[k]));
        for (std::size_t k1 = 0; k1 < m2; ++k1)
            for (std::size_t k2 = k1; k2 < m2; ++k2)
                row[w++] = x2[k1] * x2[k2];
    }
    if (!v3_off_.empty()) {
        const std::size_t m3 = v3_off_.size();
        std::vector<double> x3(m3);
        for (std::size_t k = 0; k < m3; ++k)
            x3[k] = sample(2 * (symbol + v3_off_[k]));
        for (std::size_t k1 = 0; k1 < m3; ++k1)
            for (std::size_t k2 = k1; k2 < m3; ++k2)
                for (std::size_t k3 = k2; k3 < m3; ++k3)
                    row[w++] = x3[k1] * x3[k2] * x3[k3];
    }
}

std::vector<double> build_feature_row(const Waveform& rx, std::size_t symbol,
                                      const EqualizerConfig& cfg) {
    FeatureLayout layout(cfg);
    const std::size_t n_sym = rx.samples.size() / 2;
    if (symbol < layout.first_valid_symbol() || symbol >= layout.last_valid_symbol(n_sym))
        throw std::out_of_range("build_feature_row: symbol lacks full context");
    std::vector<double> row;
    layout.build_row(rx.samples, static_cast<std::ptrdiff_t>(symbol), row);
    return row;
}

TrainResult train(const Waveform& rx, const std::vector<double>& targets,
                  const EqualizerConfig& cfg) {
    cfg.validate();
    if (rx.samples.size() % 2 != 0)
        throw std::invalid_argument("train: rx must be at 2 samples/symbol");
    const std::size_t n_sym = rx.samples.size() / 2;
    const std::size_t span = static_cast<std::size_t>(cfg.training_symbols);
    if (targets.size() < span)
        throw std::invalid_argument("train: targets shorter than training_symbols");
    if (span > n_sym)
        throw std::invalid_argument("train: rx does not cover the training span");

    FeatureLayout layout(cfg);
    const std::size_t f = layout.count();
    const std::size_t row_begin = layout.first_valid_symbol();
    const std::size_t row_end = std::min(span, layout.last_valid_symbol(n_sym));
    if (row_end <= row_begin)
        throw std::invalid_argument("train: training span shorter than the equalizer context");

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(f),
                                              static_cast<Eigen::Index>(f));
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(f));
    Eigen::VectorXd x(static_cast<Eigen::Index>(f));
    std::vector<double> row;
    for (std::size_t sym = row_begin; sym < row_end; ++sym) {
        layout.build_row(rx.samples, static_cast<std::ptrdiff_t>(sym), row);
        for (std::size_t i = 0; i < f; ++i)
            x(static_cast<Eigen::Index>(i)) = row[i];
        a.selfadjointView<Eigen::Lower>().rankUpdate(x);
        b += targets[sym] * x;
    }
    a = a.selfadjointView<Eigen::Lower>();
    if (cfg.ridge_lambda > 0.0)
        a.diagonal().array() += cfg.ridge_lambda;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
    if (cfg.ridge_lambda == 0.0) {
        const auto d = ldlt.vectorD();
        const double dmax = d.cwiseAbs().maxCoeff();
        if (!(dmax > 0.0) || d.cwiseAbs().minCoeff() <= 1e-12 * dmax)
            throw SingularSystemError(
                "train: normal equations are rank deficient; set ridge_lambda > 0");
    }
    Eigen::VectorXd w = ldlt.solve(b);
    if (!w.allFinite())
        throw SingularSystemError("train: solve produced non-finite weights; set ridge_lambda > 0");

    TrainResult result;
    result.kernels.cfg = cfg;
    result.kernels.weights.assign(w.data(), w.data() + w.size());
    result.rows = row_end - row_begin;

    // residuals recomputed row by row: the aggregate-form sum cancels badly
    // at the 1e−12 MSE scale this is asserted against
    double sse = 0.0;
    for (std::size_t sym = row_begin; sym < row_end; ++sym) {
        layout.build_row(rx.samples, static_cast<std::ptrdiff_t>(sym), row);
        double yhat = 0.0;
        for (std::size_t i = 0; i < f; ++i)
            yhat += result.kernels.weights[i] * row[i];
        const double e = yhat - targets[sym];
        sse += e * e;
    }
    result.training_mse = sse / static_cast<double>(result.rows);
    return result;
}

TrainResult train(const Waveform& rx, const std::vector<int>& known_symbols,
                  const EqualizerConfig& cfg) {
    std::vector<double> targets(known_symbols.begin(), known_symbols.end());
    return train(rx, targets, cfg);
}

EqualizedBlock apply(const VolterraKernels& kernels, const Waveform& rx) {
    if (rx.samples.size() % 2 != 0)
        throw std::invalid_argument("apply: rx must be at 2 samples/symbol");
    FeatureLayout layout(kernels.cfg);
    if (kernels.weights.size() != layout.count())
        throw std::invalid_argument("apply: kernel/config shape mismatch");

    const std::size_t n_sym = rx.samples.size() / 2;
    EqualizedBlock out;
    out.y.resize(n_sym);
    out.valid_begin = std::min(layout.first_valid_symbol(), n_sym);
    out.valid_end = layout.last_valid_symbol(n_sym);

    std::vector<double> row;
    for (std::size_t sym = 0; sym < n_sym; ++sym) {
        layout.build_row(rx.samples, static_cast<std::ptrdiff_t>(sym), row);
        double acc = 0.0;
        for (std::size_t i = 0; i < row.size(); ++i)
            acc += kernels.weights[i] * row[i];
        out.y[sym] = acc;
    }
    return out;
}

int hard_decide_level(double value, const PamConstellation& constellation) {
    const int peak = constellation.max_level();
    const double a = std::abs(value);
    int magnitude = 2 * static_cast<int>(std::floor(a / 2.0)) + 1;
    magnitude = std::min(magnitude, peak);
    return value < 0.0 ? -magnitude : magnitude;
}

std::vector<int> hard_decide(const std::vector<double>& values,
                             const PamConstellation& constellation) {
    std::vector<int> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        out[i] = hard_decide_level(values[i], constellation);
    return out;
}

void write_kernels_csv(const std::string& path, const VolterraKernels& kernels) {
    FeatureLayout layout(kernels.cfg);
    if (kernels.weights.size() != layout.count())
        throw std::invalid_argument("write_kernels_csv: kernel/config shape mismatch");
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("write_kernels_csv: cannot open " + path);
    const auto& cfg = kernels.cfg;
    f << "# linear_taps=" << cfg.linear_taps << " v2_memory=" << cfg.v2_memory
      << " v3_memory=" << cfg.v3_memory << '\n';
    f << "order,lag1,lag2,lag3,value\n";
    f.precision(15);

    std::size_t w = 0;
    const int half = (cfg.linear_taps - 1) / 2;
    for (int j = -half; j <= half; ++j)
        f << "1," << j << ",-1,-1," << kernels.weights[w++] << '\n';
    auto off = [](int k, int memory) { return k - (memory - 1) / 2; };
    for (int k1 = 0; k1 < cfg.v2_memory; ++k1)
        for (int k2 = k1; k2 < cfg.v2_memory; ++k2)
            f << "2," << off(k1, cfg.v2_memory) << ',' << off(k2, cfg.v2_memory) << ",-1,"
              << kernels.weights[w++] << '\n';
    for (int k1 = 0; k1 < cfg.v3_memory; ++k1)
        for (int k2 = k1; k2 < cfg.v3_memory; ++k2)
            for (int k3 = k2; k3 < cfg.v3_memory; ++k3)
                f << "3," << off(k1, cfg.v3_memory) << ',' << off(k2, cfg.v3_memory) << ','
                  << off(k3, cfg.v3_memory) << ',' << kernels.weights[w++] << '\n';
}

VolterraKernels read_kernels_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("read_kernels_csv: cannot open " + path);
    std::string line;
    if (!std::getline(f, line) || line.rfind("# linear_taps=", 0) != 0)
        throw std::runtime_error("read_kernels_csv: missing config header");

    VolterraKernels kernels;
    {
        std::istringstream hdr(line);
        std::string tok;
        while (hdr >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos)
                continue;
            const std::string key = tok.substr(0, eq);
            const int value = std::stoi(tok.substr(eq + 1));
            if (key == "linear_taps") kernels.cfg.linear_taps = value;
            else if (key == "v2_memory") kernels.cfg.v2_memory = value;
            else if (key == "v3_memory") kernels.cfg.v3_memory = value;
        }
    }
    std::getline(f, line); // column header
    while (std::getline(f, line)) {
        if (line.empty())
            continue;
        std::istringstream row(line);
        std::string field;
        double value = 0.0;
        for (int i = 0; i < 4; ++i)
            std::getline(row, field, ',');
        row >> value;
        kernels.weights.push_back(value);
    }
    if (kernels.weights.size() != kernels.cfg.feature_count())
        throw std::runtime_error("read_kernels_csv: row count does not match header config");
    return kernels;
}

} // namespace pamsim
