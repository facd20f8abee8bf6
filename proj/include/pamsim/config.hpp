#ifndef PAMSIM_CONFIG_HPP
#define PAMSIM_CONFIG_HPP

#include <string>

#include "pamsim/harness.hpp"

namespace pamsim {

// Flat sectioned key-value config:
//
//   # comment (also ';')
//   [link]                 symbol_rate_gbd, bits_per_symbol, oversample,
//                          dac_bw_ghz, dac_bits, vpp_dac_mv, ea_gain_db,
//                          bias_v, eml_v_infl, eml_slope_per_v, eml_p_max_mw,
//                          eml_curve_csv, eml_bw_ghz, rx_bw_ghz,
//                          pd_responsivity, snr_db, rx_lpf_order,
//                          rx_lpf_cutoff, seed
//   [distribution]         format (uniform|cap|cup), alpha, ps_oh
//   [equalizer <name>]     linear_taps, v2_memory, v3_memory, ridge_lambda,
//                          training_symbols   (repeatable; replaces defaults)
//   [experiment]           trial_symbols, fec_oh, ber_threshold,
//                          histogram_bins, sweep_axis, sweep_grid
//
// sweep_grid is either a comma list (200,230,260) or start:stop:step.
// Bandwidths and snr_db accept `inf` to disable the stage. Unknown sections
// or keys are errors.
ExperimentSpec parse_experiment_text(const std::string& text);
ExperimentSpec parse_experiment_file(const std::string& path);

} // namespace pamsim

#endif
