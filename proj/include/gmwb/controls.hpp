#pragma once

#include <cstdint>
#include <vector>

#include "gmwb/grid.hpp"

namespace gmwb {

enum class WithdrawBranch : std::uint8_t { None = 0, ContinuousRate = 1, FiniteAmount = 2 };

// Optimal withdrawal per node at one intervention time, stored for MC replay
// and control-map extraction.  Covers the left pad plus the interior in w
// (array rows iw in [0, iw_hi]) and the interior in r (columns ik_lo..ik_hi).
struct ControlField {
    const Grid* grid = nullptr;
    int step_m = 0;
    int nw = 0, nk = 0;
    std::vector<float> gamma;          // [j][iw][ikc]
    std::vector<std::uint8_t> branch;  // WithdrawBranch values

    ControlField() = default;
    ControlField(const Grid& g, int m)
        : grid(&g),
          step_m(m),
          nw(g.iw_hi() + 1),
          nk(g.n_interior_r()),
          gamma(std::size_t(g.J + 1) * nw * nk, 0.0f),
          branch(std::size_t(g.J + 1) * nw * nk, 0) {}

    std::size_t idx(int j, int iw, int ikc) const {
        return (std::size_t(j) * nw + iw) * nk + ikc;
    }
    void set(int j, int iw, int ik, float gam, WithdrawBranch b) {
        const std::size_t i = idx(j, iw, ik - grid->ik_lo());
        gamma[i] = gam;
        branch[i] = std::uint8_t(b);
    }
};

// Trilinear interpolation of gamma over (w, r, a); queries clamp to the stored
// lattice hull.
double interp_control(const ControlField& c, double w, double r, double a);

}  // namespace gmwb
