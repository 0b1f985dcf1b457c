#pragma once

#include <utility>
#include <vector>

#include "gmwb/controls.hpp"
#include "gmwb/interp.hpp"
#include "gmwb/timestep.hpp"

namespace gmwb {

// Banded system (I - dtau L_d^h) v = rhs over the interior rate indices.
struct TridiagonalSystem {
    std::vector<double> sub, diag, super, rhs;
    // Thomas elimination; asserts strictly positive pivots (guaranteed by the
    // positive-coefficient construction with 1 + dtau r > 0).
    std::vector<double> solve() const;
};

// Payoff at tau = 0 on every node of the padded lattice.
ValueField initial_condition(const Grid& g, const Contract& contract);

// Dirichlet data v = exp(-beta tau) exp(w) on the right pad rows.
void apply_wmax(ValueField& f, const Contract&, const ModelParams& p, double tau);

// Stopped-process values on the corner rows: discounted payoff with the rate
// clamped to [r_min, r_max] and the theoretical cap realized at exp(wd_max).
void apply_corner(ValueField& f, const ModelParams& p, const Contract& contract, double tau);

// Positive-coefficient stencil for L_d = sigma_r^2/2 v_rr + delta(theta-r) v_r:
// central differencing when both weights are nonnegative, one-sided upwinding
// of the drift otherwise.
std::pair<double, double> positive_coeffs(const ModelParams& p, double r_k, double dr);

// Left-pad update for slice j: intervention over [0, a_j] with a-only
// interpolation of v^m, then one fully implicit step of L_d per w-row with the
// Dirichlet closures taken from the corner values at tau_next.
void step_wmin(const ValueField& v_m, int j, const std::vector<Candidate>& cands,
               const ModelParams& p, const Contract& contract, double tau_next,
               double* v_next_slice, ControlField* controls);

}  // namespace gmwb
