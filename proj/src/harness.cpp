#include "pamsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "pamsim/rng.hpp"

namespace pamsim {

ShapedDistribution DistributionSpec::realize(int m) const {
    if (kind == Kind::uniform)
        return uniform_pam(m);
    const double target = static_cast<double>(m) / (1.0 + ps_oh);
    const double nu = solve_nu(target, alpha, m, polarity);
    return mb_pmf(nu, alpha, m);
}

std::string DistributionSpec::name() const {
    if (kind == Kind::uniform)
        return "uniform";
    std::ostringstream s;
    s << (polarity == Polarity::cap ? "cap" : "cup") << "_go" << alpha;
    return s.str();
}

std::string to_string(SweepAxis axis) {
    switch (axis) {
    case SweepAxis::none: return "none";
    case SweepAxis::vpp_dac: return "vpp_dac";
    case SweepAxis::symbol_rate: return "symbol_rate";
    case SweepAxis::alpha: return "alpha";
    }
    return "?";
}

ExperimentSpec ExperimentSpec::defaults() {
    ExperimentSpec spec;
    EqualizerConfig ffe;
    ffe.linear_taps = 31;
    EqualizerConfig vnle = ffe;
    vnle.v2_memory = 7;
    vnle.v3_memory = 9;
    spec.equalizers = {{"ffe", ffe}, {"vnle", vnle}};
    return spec;
}

void ExperimentSpec::validate() const {
    link.validate();
    if (equalizers.empty())
        throw std::invalid_argument("ExperimentSpec: need at least one equalizer");
    for (const auto& [name, cfg] : equalizers) {
        if (name.empty())
            throw std::invalid_argument("ExperimentSpec: equalizer name must not be empty");
        cfg.validate();
        if (static_cast<std::size_t>(cfg.training_symbols) < 4 * cfg.feature_count())
            throw std::invalid_argument("ExperimentSpec: training_symbols below 4x coefficient count for '" +
                                        name + "'");
        if (trial_symbols < cfg.training_symbols + 10000)
            throw std::invalid_argument("ExperimentSpec: trial_symbols must exceed training_symbols + 1e4");
    }
    if (axis != SweepAxis::none) {
        if (grid.empty())
            throw std::invalid_argument("ExperimentSpec: sweep grid is empty");
        if (!std::is_sorted(grid.begin(), grid.end()))
            throw std::invalid_argument("ExperimentSpec: sweep grid must be sorted");
        if (axis == SweepAxis::alpha && distribution.kind == DistributionSpec::Kind::uniform)
            throw std::invalid_argument("ExperimentSpec: alpha sweep needs a shaped distribution");
    }
    if (distribution.kind == DistributionSpec::Kind::shaped) {
        if (!(distribution.ps_oh > 0.0))
            throw std::invalid_argument("ExperimentSpec: ps_oh must be > 0 for shaped formats");
        if (!(distribution.alpha > 0.0))
            throw std::invalid_argument("ExperimentSpec: alpha must be > 0");
    }
    if (fec_oh < 0.0)
        throw std::invalid_argument("ExperimentSpec: fec_oh must be >= 0");
    if (!(ber_threshold > 0.0))
        throw std::invalid_argument("ExperimentSpec: ber_threshold must be > 0");
    if (histogram_bins < 8)
        throw std::invalid_argument("ExperimentSpec: histogram_bins must be >= 8");
}

std::vector<TrialOutput> run_trial(const ExperimentSpec& spec,
                                   std::optional<double> point, std::uint64_t seed) {
    ExperimentSpec resolved = spec;
    if (point) {
        switch (spec.axis) {
        case SweepAxis::vpp_dac: resolved.link.vpp_dac_mv = *point; break;
        case SweepAxis::symbol_rate: resolved.link.symbol_rate_gbd = *point; break;
        case SweepAxis::alpha: resolved.distribution.alpha = *point; break;
        case SweepAxis::none:
            throw std::invalid_argument("run_trial: sweep point given but axis is none");
        }
    }
    resolved.validate();
    const LinkConfig& cfg = resolved.link;
    const int m = cfg.bits_per_symbol;

    const ShapedDistribution dist = resolved.distribution.realize(m);
    const double h_bits = entropy(dist);
    const std::uint64_t symbol_seed = CounterRng::derive(seed, 0xA11CE);
    const std::uint64_t noise_seed = CounterRng::derive(seed, 0xB0B);

    const std::vector<int> tx =
        sample_symbols(dist, static_cast<std::size_t>(resolved.trial_symbols), symbol_seed);

    double er_db = 0.0;
    Waveform rx;
    {
        Waveform v = dac_frontend(tx, cfg);
        v = drive_voltage(v, cfg);
        Waveform optical = eml_transmit(v, cfg);
        v.samples = {};
        er_db = extinction_ratio_db(optical, tx, cfg.oversample);
        Waveform detected = photodetect(optical, cfg, noise_seed);
        optical.samples = {};
        rx = rx_frontend(detected, cfg);
    }

    std::vector<TrialOutput> outputs;
    outputs.reserve(resolved.equalizers.size());
    for (const auto& [name, eq_cfg] : resolved.equalizers) {
        const TrainResult fit = train(rx, tx, eq_cfg);
        const EqualizedBlock eq = apply(fit.kernels, rx);

        // evaluation: skip the training prefix and the context-free edges
        const std::size_t begin =
            std::max<std::size_t>(eq.valid_begin, static_cast<std::size_t>(eq_cfg.training_symbols));
        const std::size_t end = eq.valid_end;
        if (end <= begin)
            throw std::runtime_error("run_trial: no evaluation symbols left after training");

        const std::vector<double> eq_eval(eq.y.begin() + static_cast<std::ptrdiff_t>(begin),
                                          eq.y.begin() + static_cast<std::ptrdiff_t>(end));
        const std::vector<int> tx_eval(tx.begin() + static_cast<std::ptrdiff_t>(begin),
                                       tx.begin() + static_cast<std::ptrdiff_t>(end));
        const std::vector<int> decided = hard_decide(eq_eval, dist.constellation);
        const BerResult ber = ber_count(tx_eval, decided, m);

        TrialReport report;
        report.ber = ber.ber;
        report.bit_errors = ber.bit_errors;
        report.bits_compared = ber.bits_compared;
        report.symbol_errors = ber.symbol_errors;
        report.symbols_compared = ber.symbols_compared;
        report.entropy_bits = h_bits;
        report.symbol_rate_gbd = cfg.symbol_rate_gbd;
        report.air_gbps = air_gbps(cfg.symbol_rate_gbd, se_hd(h_bits, m, ber.ber));
        report.onbr_gbps = onbr_gbps(cfg.symbol_rate_gbd, h_bits, m, resolved.fec_oh,
                                     ber.ber, resolved.ber_threshold);
        report.extinction_ratio_db = er_db;
        report.histograms = level_histogram(eq_eval, tx_eval, resolved.histogram_bins, m);
        outputs.push_back({name, std::move(report)});
    }
    return outputs;
}

SweepTable run_sweep(const ExperimentSpec& spec, int threads) {
    spec.validate();
    if (spec.axis == SweepAxis::none)
        throw std::invalid_argument("run_sweep: spec has no sweep axis");

    const std::size_t n = spec.grid.size();
    std::vector<std::vector<SweepRow>> per_point(n);
    auto work = [&](std::size_t i) {
        const double point = spec.grid[i];
        const std::uint64_t seed = CounterRng::derive(spec.link.seed, i);
        try {
            auto outs = run_trial(spec, point, seed);
            for (auto& o : outs)
                per_point[i].push_back({point, o.equalizer, std::move(o.report), {}});
        } catch (const std::exception& e) {
            for (const auto& [name, cfg] : spec.equalizers)
                per_point[i].push_back({point, name, std::nullopt, e.what()});
        }
    };

    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        const int workers = std::min<int>(threads, static_cast<int>(n));
        pool.reserve(static_cast<std::size_t>(workers));
        for (int t = 0; t < workers; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
                    work(i);
            });
        for (auto& th : pool)
            th.join();
    }

    SweepTable table;
    for (auto& rows : per_point)
        for (auto& row : rows)
            table.rows.push_back(std::move(row));
    return table;
}

void write_results_csv(const std::string& path, const ExperimentSpec& spec,
                       const SweepTable& table) {
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("write_results_csv: cannot open " + path);
    f << "vpp_mV,symbol_rate_GBd,format,equalizer,ber,air_Gbps,onbr_Gbps,er_dB\n";
    f.precision(10);
    const std::string format = spec.distribution.name();
    for (const auto& row : table.rows) {
        if (!row.report)
            continue;
        double vpp = spec.link.vpp_dac_mv;
        double baud = spec.link.symbol_rate_gbd;
        if (spec.axis == SweepAxis::vpp_dac)
            vpp = row.point;
        else if (spec.axis == SweepAxis::symbol_rate)
            baud = row.point;
        std::string fmt = format;
        if (spec.axis == SweepAxis::alpha) {
            DistributionSpec d = spec.distribution;
            d.alpha = row.point;
            fmt = d.name();
        }
        f << vpp << ',' << baud << ',' << fmt << ',' << row.equalizer << ',' << row.report->ber
          << ',' << row.report->air_gbps << ',';
        if (row.report->onbr_gbps)
            f << *row.report->onbr_gbps;
        f << ',' << row.report->extinction_ratio_db << '\n';
    }
}

} // namespace pamsim
