#pragma once

#include <string>

#include "gmwb/engine.hpp"
#include "gmwb/mc.hpp"

namespace gmwb {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parsed, validated run description.  Defaults reproduce the baseline
// validation setup (Merton jump-diffusion with the Vasicek rate, T = 5,
// beta = 0.02, level 0).
struct RunConfig {
    ModelParams model;
    Contract contract;
    GridConfig grid;
    SolveOptions run;
    McConfig mc;

    double fee_tol = 1e-4;
    double fee_bracket_lo = 0.0, fee_bracket_hi = 0.2;
    double control_time = 0.0;  // calendar time of the control-map slice; 0 -> T/2
    double control_rate = 0.0;  // rate of the control-map slice; 0 -> r0
    std::string out;            // output CSV path ("" -> stdout)

    // Raw withdrawal specification: a fraction of the premium per year by
    // default (C_r = rate * z0), or currency per year when absolute.
    double withdraw_rate_input = 0.0;  // 0 -> 1/T
    bool withdraw_rate_absolute = false;

    // mc-validate stores controls by default; an explicit store_controls key
    // in the config wins (and false there exercises the missing-controls path).
    bool store_controls_set = false;

    void finalize();  // resolves derived fields and validates everything
};

RunConfig default_config();
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);  // config_error names the path

// Single-line JSON echo of the effective configuration (CSV header comment).
std::string config_echo(const RunConfig& cfg);

}  // namespace gmwb
