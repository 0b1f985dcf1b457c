#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "gmwb/model.hpp"

namespace gmwb {

// Thrown when a construction-time grid condition fails; the message names the
// violated inequality.
struct grid_condition_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ASpacing { Uniform, Geometric };

struct GridConfig {
    int level = 0;  // refinement level per the preconfigured ladder below

    // Explicit overrides; 0 (or nan bounds) means "derive from level/contract".
    int n_w = 0;    // N, interior w point count (power of two)
    int n_r = 0;    // K, interior r point count (power of two)
    int n_a = 0;    // J, number of a-intervals
    int n_tau = 0;  // M, number of timesteps

    double w_min = 0.0, w_max = 0.0;  // both 0 -> ln z0 -/+ 10
    double r_min = -0.2, r_max = 0.3;

    int padding_factor = 2;  // N_dag = pf*N, K_dag = pf*K

    ASpacing a_spacing = ASpacing::Uniform;
    double a_geometric_ratio = 1.08;  // cell growth when a_spacing == Geometric
};

// Node layout: w_i = wd_min + i dw for array index i in [0, Nd]; the signed
// index of the papers' convention is n = i - Nd/2.  Fields live on the Nd x Kd
// lattice i in [0, Nd), k in [0, Kd) (the right edge is the periodic image).
struct Grid {
    int N = 0, K = 0, J = 0, M = 0;
    int Nd = 0, Kd = 0;  // padded counts N_dag, K_dag
    double T = 0.0;
    double w_min = 0, w_max = 0, wd_min = 0, wd_max = 0;
    double r_min = 0, r_max = 0, rd_min = 0, rd_max = 0;
    double dw = 0, dr = 0, dtau = 0;
    double w_hat0 = 0, r_hat0 = 0;
    std::vector<double> a;  // J+1 nondecreasing nodes, a[0]=0, a[J]=z0
    double da_max = 0, da_min = 0;

    // e^{w_min} - e^{wd_min} >= C_r dtau; violated with deep w_min at realistic
    // withdrawal rates, so recorded as a diagnostic instead of a hard failure.
    bool w_min_condition_ok = false;
    std::string w_min_condition_note;

    double w_of(int i) const { return wd_min + i * dw; }
    double r_of(int k) const { return rd_min + k * dr; }

    // Inclusive array-index ranges of the interior sets (papers' open intervals).
    int iw_lo() const { return Nd / 2 - N / 2 + 1; }
    int iw_hi() const { return Nd / 2 + N / 2 - 1; }
    int ik_lo() const { return Kd / 2 - K / 2 + 1; }
    int ik_hi() const { return Kd / 2 + K / 2 - 1; }
    int n_interior_w() const { return N - 1; }
    int n_interior_r() const { return K - 1; }

    // Left pad spans [0, iw_lo()-1]; right pad [iw_hi()+1, Nd-1].
    int left_pad_count() const { return iw_lo(); }

    std::size_t slice_size() const { return std::size_t(Nd) * Kd; }
    std::size_t field_size() const { return slice_size() * (J + 1); }

    // Locate the a-cell containing x (clamped); returns q with a[q] <= x <= a[q+1].
    int a_cell(double x, double* frac) const;
};

enum class SubdomainTag { Interior, LeftPad, RightPad, Corner };

// Table of preconfigured refinement levels: N=2^(9+l), K=2^(5+l),
// J=25*2^l+1 intervals, M=round(4T)*2^l.
GridConfig preset_level(int level, double T);

Grid build_grid(const GridConfig& cfg, const Contract& contract);

// n, k are signed lattice indices (n in [-Nd/2, Nd/2-1], likewise k).
SubdomainTag classify(const Grid& g, int n, int k);

}  // namespace gmwb
