#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gmwb/boundary.hpp"
#include "gmwb/controls.hpp"
#include "gmwb/kernel.hpp"

namespace gmwb {

struct bracket_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct controls_missing_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct stability_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolveOptions {
    double eps = 1e-6;   // monotonicity tolerance of the weight selection
    double eps1 = 1e-6;  // accuracy tolerance of the weight selection
    int alpha_cap = 64;
    bool store_controls = false;
    CandidatePolicy policy;
    bool check_stability = true;  // assert the l-infinity bound every step
    int threads = 1;              // guarantee-level slices processed in parallel
};

struct StepDiagnostics {
    double max_abs = 0.0;
    double bound = 0.0;  // l-infinity bound at this step (worst j)
};

struct Solution {
    const Grid* grid = nullptr;
    ModelParams params;
    Contract contract;
    ValueField final_field;  // tau = T
    KernelWeights kernel;
    std::vector<ControlField> controls;  // M entries when stored, else empty
    std::vector<StepDiagnostics> diagnostics;
    double wall_seconds = 0.0;
};

// Backward induction over all M timesteps.  A precomputed kernel for the same
// (grid, params-ex-beta, dtau) may be passed to skip the alpha-selection loop;
// the Fourier weights do not depend on the fee.
Solution solve(const Grid& g, const ModelParams& p, const Contract& contract,
               const SolveOptions& opt, const KernelWeights* kernel = nullptr);

// One full backward step applied to an arbitrary time level (intervention,
// SL shift, convolution, branch max, boundary updates).  Exposed for property
// tests of the scheme's one-step operator.
ValueField solve_single_step(const Grid& g, const ModelParams& p, const Contract& contract,
                             const SolveOptions& opt, const KernelWeights& kernel,
                             const ValueField& v_m, double tau_next);

// Contract value at sub-account balance z, spot rate r, guarantee balance a.
double price_at(const Solution& sol, double z, double r, double a);

struct FeeResult {
    double beta_f = 0.0;
    int iterations = 0;
    double price = 0.0;
};

// Fair fee via bracketed secant on beta -> price(beta) - z0 over [lo, hi].
FeeResult fair_fee(const Grid& g, ModelParams p, const Contract& contract, double tol,
                   const SolveOptions& opt, double bracket_lo = 0.0, double bracket_hi = 0.2,
                   int max_iter = 30);

struct ControlMapRow {
    double z, a, gamma;
    WithdrawBranch branch;
};

// Stored-control slice at calendar time t and the rate node nearest r_spot.
std::vector<ControlMapRow> control_map(const Solution& sol, double t, double r_spot);

}  // namespace gmwb
