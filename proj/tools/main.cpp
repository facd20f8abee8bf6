// pamsim — simulator and rate calculator for probabilistically shaped PAM-8
// over an unamplified IM/DD link with an EML.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pamsim/config.hpp"
#include "pamsim/harness.hpp"
#include "pamsim/metrics.hpp"
#include "pamsim/shaping.hpp"

namespace fs = std::filesystem;
using namespace pamsim;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    int threads = 1;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "experiment config file");
    cmd->add_option("--out", opts.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--seed", opts.seed, "override the master seed");
    cmd->add_option("--threads", opts.threads, "parallel grid points")->capture_default_str();
}

struct FormatOpts {
    std::string format;
    std::optional<double> alpha;
    std::optional<double> ps_oh;
    std::optional<double> vpp;
    std::optional<double> baud;
    std::optional<double> snr;
    std::optional<long> symbols;
};

void add_overrides(CLI::App* cmd, FormatOpts& opts) {
    cmd->add_option("--format", opts.format, "uniform | cap | cup")
        ->check(CLI::IsMember({"uniform", "cap", "cup"}));
    cmd->add_option("--alpha", opts.alpha, "Gaussian order for shaped formats");
    cmd->add_option("--ps-oh", opts.ps_oh, "probabilistic shaping overhead");
    cmd->add_option("--vpp", opts.vpp, "DAC swing in mV");
    cmd->add_option("--baud", opts.baud, "symbol rate in GBd");
    cmd->add_option("--snr", opts.snr, "detector SNR in dB (inf disables noise)");
    cmd->add_option("--symbols", opts.symbols, "symbols per trial");
}

ExperimentSpec load_spec(const CommonOpts& common, const FormatOpts& fmt) {
    ExperimentSpec spec = common.config_path.empty() ? ExperimentSpec::defaults()
                                                     : parse_experiment_file(common.config_path);
    if (common.seed)
        spec.link.seed = *common.seed;
    if (!fmt.format.empty()) {
        if (fmt.format == "uniform") {
            spec.distribution.kind = DistributionSpec::Kind::uniform;
        } else {
            spec.distribution.kind = DistributionSpec::Kind::shaped;
            spec.distribution.polarity = (fmt.format == "cap") ? Polarity::cap : Polarity::cup;
        }
    }
    if (fmt.alpha)
        spec.distribution.alpha = *fmt.alpha;
    if (fmt.ps_oh)
        spec.distribution.ps_oh = *fmt.ps_oh;
    if (fmt.vpp)
        spec.link.vpp_dac_mv = *fmt.vpp;
    if (fmt.baud)
        spec.link.symbol_rate_gbd = *fmt.baud;
    if (fmt.snr)
        spec.link.snr_db = *fmt.snr;
    if (fmt.symbols)
        spec.trial_symbols = *fmt.symbols;
    return spec;
}

void write_pmf_outputs(const fs::path& out_dir, const ExperimentSpec& spec) {
    fs::create_directories(out_dir / "pmfs");
    const auto dist = spec.distribution.realize(spec.link.bits_per_symbol);
    write_pmf_csv((out_dir / "pmfs" / (spec.distribution.name() + ".csv")).string(), dist);
}

void print_report_line(const std::string& name, const TrialReport& r) {
    std::printf("  %-5s BER %.5g  AIR %.2f Gb/s  ONBR ", name.c_str(), r.ber, r.air_gbps);
    if (r.onbr_gbps)
        std::printf("%.2f Gb/s", *r.onbr_gbps);
    else
        std::printf("-");
    std::printf("  ER %.2f dB\n", r.extinction_ratio_db);
}

int cmd_design_dist(const CommonOpts& common, double ps_oh, std::optional<double> target_h,
                    double alpha, const std::string& polarity, int m, bool to_file) {
    const Polarity pol = (polarity == "cup") ? Polarity::cup : Polarity::cap;
    const double h = target_h ? *target_h : static_cast<double>(m) / (1.0 + ps_oh);
    const double nu = solve_nu(h, alpha, m, pol);
    const auto dist = mb_pmf(nu, alpha, m);

    std::fprintf(stderr, "nu = %.10g  entropy = %.6f bits  PS OH = %.4f%%\n", nu, entropy(dist),
                 100.0 * ps_overhead(entropy(dist), m));
    if (to_file) {
        fs::create_directories(fs::path(common.out_dir) / "pmfs");
        DistributionSpec d;
        d.kind = DistributionSpec::Kind::shaped;
        d.polarity = pol;
        d.alpha = alpha;
        const auto path = fs::path(common.out_dir) / "pmfs" / (d.name() + ".csv");
        write_pmf_csv(path.string(), dist);
        std::printf("wrote %s\n", path.string().c_str());
    } else {
        write_pmf_csv(std::cout, dist);
    }
    return 0;
}

int cmd_rates(double h, int m, double fec_oh, double baud, std::optional<double> ber,
              double threshold) {
    std::printf("H          = %.6f bits/symbol\n", h);
    std::printf("PS OH      = %.4f %%\n", 100.0 * ps_overhead(h, m));
    std::printf("SE (PAS)   = %.6f bits/symbol\n", se_pas(h, m, fec_oh));
    if (ber) {
        std::printf("H2(BER)    = %.6f bits\n", binary_entropy(*ber));
        std::printf("SE (HD)    = %.6f bits/symbol\n", se_hd(h, m, *ber));
        std::printf("AIR        = %.2f Gb/s\n", air_gbps(baud, se_hd(h, m, *ber)));
    }
    const auto onbr = onbr_gbps(baud, h, m, fec_oh, ber.value_or(0.0), threshold);
    if (onbr)
        std::printf("ONBR       = %.2f Gb/s\n", *onbr);
    else
        std::printf("ONBR       = - (BER above the %.4g threshold)\n", threshold);
    return 0;
}

int cmd_simulate(const CommonOpts& common, const FormatOpts& fmt, bool histograms_only) {
    ExperimentSpec spec = load_spec(common, fmt);
    spec.axis = SweepAxis::none; // single trial at the configured operating point
    spec.grid.clear();
    const fs::path out_dir(common.out_dir);
    fs::create_directories(out_dir / "histograms");

    const auto outputs = run_trial(spec, std::nullopt, spec.link.seed);
    std::printf("format=%s  H=%.4f bits  vpp=%g mV  baud=%g GBd  snr=%g dB  symbols=%ld\n",
                spec.distribution.name().c_str(), outputs.front().report.entropy_bits,
                spec.link.vpp_dac_mv, spec.link.symbol_rate_gbd, spec.link.snr_db,
                spec.trial_symbols);
    for (const auto& out : outputs) {
        print_report_line(out.equalizer, out.report);
        write_histogram_csv((out_dir / "histograms" /
                             (spec.distribution.name() + "_" + out.equalizer + ".csv"))
                                .string(),
                            out.report.histograms);
    }
    write_pmf_outputs(out_dir, spec);

    if (!histograms_only) {
        SweepTable table;
        for (const auto& out : outputs)
            table.rows.push_back({spec.link.vpp_dac_mv, out.equalizer, out.report, {}});
        write_results_csv((out_dir / "results.csv").string(), spec, table);
        std::printf("wrote %s\n", (out_dir / "results.csv").string().c_str());
    }
    return 0;
}

int cmd_sweep(const CommonOpts& common, const FormatOpts& fmt, std::optional<SweepAxis> axis,
              const std::string& grid_text) {
    ExperimentSpec spec = load_spec(common, fmt);
    if (axis) {
        if (spec.axis != *axis)
            spec.grid.clear(); // a grid written for another axis does not carry over
        spec.axis = *axis;
    } else if (spec.axis == SweepAxis::none) {
        throw std::invalid_argument("sweep: the config must set sweep_axis (or use sweep-vpp/sweep-baud)");
    }
    if (!grid_text.empty()) {
        // reuse the config grammar for grids given on the command line
        const auto tmp = parse_experiment_text("[experiment]\nsweep_grid = " + grid_text + "\n");
        spec.grid = tmp.grid;
    } else if (spec.grid.empty()) {
        switch (spec.axis) {
        case SweepAxis::vpp_dac:
            spec.grid = {200, 230, 260, 290, 320, 350, 380, 410, 440, 470, 500, 530};
            break;
        case SweepAxis::symbol_rate:
            spec.grid = {100, 105, 110, 115, 120, 125, 130};
            break;
        case SweepAxis::alpha:
            spec.grid = {2.0, 3.5, 5.0};
            break;
        case SweepAxis::none:
            break;
        }
    }

    const fs::path out_dir(common.out_dir);
    fs::create_directories(out_dir);
    const auto table = run_sweep(spec, common.threads);
    std::printf("%-12s %-6s %-11s %-9s %-9s %s\n", to_string(spec.axis).c_str(), "eq", "BER",
                "AIR", "ONBR", "ER_dB");
    for (const auto& row : table.rows) {
        if (!row.report) {
            std::printf("%-12g %-6s failed: %s\n", row.point, row.equalizer.c_str(),
                        row.error.c_str());
            continue;
        }
        std::printf("%-12g %-6s %-11.5g %-9.2f ", row.point, row.equalizer.c_str(),
                    row.report->ber, row.report->air_gbps);
        if (row.report->onbr_gbps)
            std::printf("%-9.2f ", *row.report->onbr_gbps);
        else
            std::printf("%-9s ", "-");
        std::printf("%.2f\n", row.report->extinction_ratio_db);
    }
    write_results_csv((out_dir / "results.csv").string(), spec, table);
    write_pmf_outputs(out_dir, spec);
    std::printf("wrote %s\n", (out_dir / "results.csv").string().c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"shaped PAM-8 IM/DD link simulator and rate calculator"};
    app.require_subcommand(1);

    auto* design = app.add_subcommand("design-dist",
                                      "solve a shaping distribution and export its PMF");
    CommonOpts design_common;
    double ps_oh = 0.0817, alpha = 2.0;
    std::optional<double> target_h;
    std::string polarity = "cap";
    int m = 3;
    bool design_to_file = false;
    design->add_option("--ps-oh", ps_oh, "target shaping overhead")->capture_default_str();
    design->add_option("--entropy", target_h, "target entropy in bits (overrides --ps-oh)");
    design->add_option("--alpha", alpha, "Gaussian order")->capture_default_str();
    design->add_option("--polarity", polarity, "cap | cup")
        ->check(CLI::IsMember({"cap", "cup"}))
        ->capture_default_str();
    design->add_option("--m", m, "bits per symbol")->capture_default_str();
    design->add_flag("--write", design_to_file, "write under --out/pmfs/ instead of stdout");
    design->add_option("--out", design_common.out_dir, "output directory")->capture_default_str();

    auto* rates = app.add_subcommand("rates", "pure rate accounting from H, BER and symbol rate");
    double rates_h = 3.0, rates_fec = 0.07, rates_baud = 100.0, rates_thresh = 0.0046;
    int rates_m = 3;
    std::optional<double> rates_ber;
    rates->add_option("--H", rates_h, "input entropy bits/symbol")->required();
    rates->add_option("--m", rates_m, "bits per symbol")->capture_default_str();
    rates->add_option("--fec-oh", rates_fec, "FEC overhead fraction")->capture_default_str();
    rates->add_option("--baud", rates_baud, "symbol rate GBd")->required();
    rates->add_option("--ber", rates_ber, "pre-FEC BER (default 0)");
    rates->add_option("--threshold", rates_thresh, "HD-FEC BER threshold")->capture_default_str();

    auto* simulate = app.add_subcommand("simulate", "run a single end-to-end trial");
    CommonOpts sim_common;
    FormatOpts sim_fmt;
    add_common(simulate, sim_common);
    add_overrides(simulate, sim_fmt);

    auto* histogram = app.add_subcommand("histogram", "run a trial and export level histograms");
    CommonOpts hist_common;
    FormatOpts hist_fmt;
    add_common(histogram, hist_common);
    add_overrides(histogram, hist_fmt);

    auto* sweep_vpp = app.add_subcommand("sweep-vpp", "BER/AIR/ONBR across DAC swing");
    CommonOpts vpp_common;
    FormatOpts vpp_fmt;
    std::string vpp_grid;
    add_common(sweep_vpp, vpp_common);
    add_overrides(sweep_vpp, vpp_fmt);
    sweep_vpp->add_option("--grid", vpp_grid, "mV grid: comma list or start:stop:step");

    auto* sweep_baud = app.add_subcommand("sweep-baud", "BER/AIR/ONBR across symbol rate");
    CommonOpts baud_common;
    FormatOpts baud_fmt;
    std::string baud_grid;
    add_common(sweep_baud, baud_common);
    add_overrides(sweep_baud, baud_fmt);
    sweep_baud->add_option("--grid", baud_grid, "GBd grid: comma list or start:stop:step");

    auto* sweep_cfg = app.add_subcommand("sweep", "run the sweep axis configured in the file");
    CommonOpts cfg_common;
    FormatOpts cfg_fmt;
    std::string cfg_grid;
    add_common(sweep_cfg, cfg_common);
    add_overrides(sweep_cfg, cfg_fmt);
    sweep_cfg->add_option("--grid", cfg_grid, "grid override: comma list or start:stop:step");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (design->parsed())
            return cmd_design_dist(design_common, ps_oh, target_h, alpha, polarity, m,
                                   design_to_file);
        if (rates->parsed())
            return cmd_rates(rates_h, rates_m, rates_fec, rates_baud, rates_ber, rates_thresh);
        if (simulate->parsed())
            return cmd_simulate(sim_common, sim_fmt, false);
        if (histogram->parsed())
            return cmd_simulate(hist_common, hist_fmt, true);
        if (sweep_vpp->parsed())
            return cmd_sweep(vpp_common, vpp_fmt, SweepAxis::vpp_dac, vpp_grid);
        if (sweep_baud->parsed())
            return cmd_sweep(baud_common, baud_fmt, SweepAxis::symbol_rate, baud_grid);
        if (sweep_cfg->parsed())
            return cmd_sweep(cfg_common, cfg_fmt, std::nullopt, cfg_grid);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime error: %s\n", e.what());
        return 2;
    }
    return 0;
}
