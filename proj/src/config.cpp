#include "pamsim/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace pamsim {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos)
        return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    if (value == "inf" || value == "+inf")
        return std::numeric_limits<double>::infinity();
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size())
            throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad numeric value for '" + key + "': " + value);
    }
}

long parse_long(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long v = std::stol(value, &used);
        if (used != value.size())
            throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad integer value for '" + key + "': " + value);
    }
}

std::vector<double> parse_grid(const std::string& value) {
    std::vector<double> grid;
    if (value.find(':') != std::string::npos) {
        std::istringstream s(value);
        std::string a, b, c;
        std::getline(s, a, ':');
        std::getline(s, b, ':');
        std::getline(s, c);
        const double start = parse_double("sweep_grid", trim(a));
        const double stop = parse_double("sweep_grid", trim(b));
        const double step = parse_double("sweep_grid", trim(c));
        if (!(step > 0.0) || stop < start)
            throw std::invalid_argument("config: sweep_grid start:stop:step must ascend");
        for (double v = start; v <= stop + 1e-9 * step; v += step)
            grid.push_back(v);
        return grid;
    }
    std::istringstream s(value);
    std::string item;
    while (std::getline(s, item, ','))
        grid.push_back(parse_double("sweep_grid", trim(item)));
    return grid;
}

} // namespace

ExperimentSpec parse_experiment_text(const std::string& text) {
    ExperimentSpec spec = ExperimentSpec::defaults();
    bool equalizers_from_file = false;

    std::string section = "";
    std::string eq_name;
    EqualizerConfig* eq = nullptr;

    std::istringstream in(text);
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';')
            continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config: malformed section header at line " +
                                            std::to_string(lineno));
            const std::string header = trim(line.substr(1, line.size() - 2));
            if (header.rfind("equalizer", 0) == 0) {
                eq_name = trim(header.substr(9));
                if (eq_name.empty())
                    throw std::invalid_argument("config: equalizer section needs a name");
                if (!equalizers_from_file) {
                    spec.equalizers.clear();
                    equalizers_from_file = true;
                }
                spec.equalizers.emplace_back(eq_name, EqualizerConfig{});
                eq = &spec.equalizers.back().second;
                section = "equalizer";
            } else if (header == "link" || header == "distribution" || header == "experiment") {
                section = header;
                eq = nullptr;
            } else {
                throw std::invalid_argument("config: unknown section [" + header + "]");
            }
            continue;
        }

        const auto eq_pos = line.find('=');
        if (eq_pos == std::string::npos)
            throw std::invalid_argument("config: expected key = value at line " +
                                        std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq_pos));
        const std::string value = trim(line.substr(eq_pos + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument("config: empty key or value at line " +
                                        std::to_string(lineno));

        if (section == "link") {
            LinkConfig& l = spec.link;
            if (key == "symbol_rate_gbd") l.symbol_rate_gbd = parse_double(key, value);
            else if (key == "bits_per_symbol") l.bits_per_symbol = static_cast<int>(parse_long(key, value));
            else if (key == "oversample") l.oversample = static_cast<int>(parse_long(key, value));
            else if (key == "dac_bw_ghz") l.dac_bw_ghz = parse_double(key, value);
            else if (key == "dac_bits") l.dac_bits = static_cast<int>(parse_long(key, value));
            else if (key == "vpp_dac_mv") l.vpp_dac_mv = parse_double(key, value);
            else if (key == "ea_gain_db") l.ea_gain_db = parse_double(key, value);
            else if (key == "bias_v") l.bias_v = parse_double(key, value);
            else if (key == "eml_v_infl") l.eml.v_infl = parse_double(key, value);
            else if (key == "eml_slope_per_v") l.eml.slope = parse_double(key, value);
            else if (key == "eml_p_max_mw") l.eml.p_max_mw = parse_double(key, value);
            else if (key == "eml_curve_csv") l.eml = EmlCurve::from_csv(value);
            else if (key == "eml_bw_ghz") l.eml_bw_ghz = parse_double(key, value);
            else if (key == "rx_bw_ghz") l.rx_bw_ghz = parse_double(key, value);
            else if (key == "pd_responsivity") l.pd_responsivity = parse_double(key, value);
            else if (key == "snr_db") l.snr_db = parse_double(key, value);
            else if (key == "rx_lpf_order") l.rx_lpf_order = static_cast<int>(parse_long(key, value));
            else if (key == "rx_lpf_cutoff") l.rx_lpf_cutoff = parse_double(key, value);
            else if (key == "seed") l.seed = static_cast<std::uint64_t>(parse_long(key, value));
            else throw std::invalid_argument("config: unknown [link] key '" + key + "'");
        } else if (section == "distribution") {
            DistributionSpec& d = spec.distribution;
            if (key == "format") {
                if (value == "uniform") d.kind = DistributionSpec::Kind::uniform;
                else if (value == "cap") { d.kind = DistributionSpec::Kind::shaped; d.polarity = Polarity::cap; }
                else if (value == "cup") { d.kind = DistributionSpec::Kind::shaped; d.polarity = Polarity::cup; }
                else throw std::invalid_argument("config: format must be uniform|cap|cup");
            } else if (key == "alpha") d.alpha = parse_double(key, value);
            else if (key == "ps_oh") d.ps_oh = parse_double(key, value);
            else throw std::invalid_argument("config: unknown [distribution] key '" + key + "'");
        } else if (section == "equalizer") {
            if (key == "linear_taps") eq->linear_taps = static_cast<int>(parse_long(key, value));
            else if (key == "v2_memory") eq->v2_memory = static_cast<int>(parse_long(key, value));
            else if (key == "v3_memory") eq->v3_memory = static_cast<int>(parse_long(key, value));
            else if (key == "ridge_lambda") eq->ridge_lambda = parse_double(key, value);
            else if (key == "training_symbols") eq->training_symbols = static_cast<int>(parse_long(key, value));
            else throw std::invalid_argument("config: unknown [equalizer] key '" + key + "'");
        } else if (section == "experiment") {
            if (key == "trial_symbols") spec.trial_symbols = parse_long(key, value);
            else if (key == "fec_oh") spec.fec_oh = parse_double(key, value);
            else if (key == "ber_threshold") spec.ber_threshold = parse_double(key, value);
            else if (key == "histogram_bins") spec.histogram_bins = static_cast<int>(parse_long(key, value));
            else if (key == "sweep_axis") {
                if (value == "none") spec.axis = SweepAxis::none;
                else if (value == "vpp_dac") spec.axis = SweepAxis::vpp_dac;
                else if (value == "symbol_rate") spec.axis = SweepAxis::symbol_rate;
                else if (value == "alpha") spec.axis = SweepAxis::alpha;
                else throw std::invalid_argument("config: unknown sweep_axis '" + value + "'");
            } else if (key == "sweep_grid") spec.grid = parse_grid(value);
            else throw std::invalid_argument("config: unknown [experiment] key '" + key + "'");
        } else {
            throw std::invalid_argument("config: key '" + key + "' outside any section");
        }
    }
    return spec;
}

ExperimentSpec parse_experiment_file(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw std::invalid_argument("config: cannot open file: " + path);
    std::ostringstream text;
    text << f.rdbuf();
    return parse_experiment_text(text.str());
}

} // namespace pamsim
