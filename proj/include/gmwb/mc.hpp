#pragma once

#include <cstdint>
#include <random>

#include "gmwb/engine.hpp"

namespace gmwb {

struct McConfig {
    int n_paths = 20000;  // total paths (pairs count double under antithetic)
    int substeps = 20;    // simulation substeps per PDE step
    std::uint64_t seed = 12345;
    bool antithetic = true;
};

struct McResult {
    double mean = 0.0;
    double std_error = 0.0;
    double ci_low = 0.0, ci_high = 0.0;  // 95% interval
    int n_paths = 0;
};

// Deterministic per-path RNG: mt19937_64 streams keyed by (seed, path index)
// through splitmix mixing, with an explicit Box-Muller normal so results are
// identical across standard libraries.
struct PathRng {
    std::mt19937_64 eng;
    bool have_spare = false;
    double spare = 0.0;
    PathRng(std::uint64_t seed, std::uint64_t path);
    double uniform();  // (0,1)
    double normal();
    int poisson(double mean);
};

// Exact Vasicek transition over dt.
double vasicek_step(double r, double dt, const ModelParams& p, double z_draw);

// One log-Euler sub-account step with the given Gaussian pair and jump
// multiplier; the continuous withdrawal is subtracted after growth and the
// result floored at zero.
double sub_account_step(double z, double r, double dt, const ModelParams& p, double z_r,
                        double z_perp, double jump_mult, double withdraw_amount);

// Replays the stored PDE-optimal controls along simulated paths and reports a
// 95% confidence interval for the time-0 contract value.
McResult replay(const Solution& sol, const McConfig& cfg);

}  // namespace gmwb
