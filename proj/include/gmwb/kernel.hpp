#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "gmwb/grid.hpp"
#include "gmwb/model.hpp"

namespace gmwb {

struct kernel_convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fourier-domain weights of the one-step transition operator, plus the
// diagnostics of the alpha-selection loop.  Layouts match a row-major
// (Nd, Kd) transform of a [iw][ik] slice: G_full[s*Kd + z] and the
// half-spectrum G_half[s*(Kd/2+1) + z] used with real transforms.
struct KernelWeights {
    int Nd = 0, Kd = 0;
    std::vector<std::complex<double>> G_full;
    std::vector<std::complex<double>> G_half;
    std::vector<double> g_phys;  // physical weights g~_{p,q}, FFT index order
    int alpha_eps = 0;
    double monotonicity_defect = 0.0;  // dw dr sum |min(g~,0)| at acceptance
    double accuracy_residual = 0.0;    // test2 at acceptance
    double weight_sum_error = 0.0;     // |dw dr sum g~ - 1|
};

// Characteristic exponent Psi(eta, xi) of the Green's function G = exp(Psi dtau).
// sigma_r is floored at 1e-4 here so that a sigma_r = 0 configuration keeps a
// proper (non-distributional) kernel in the rate direction.
std::complex<double> psi(const ModelParams& p, double eta, double xi);

// Physical weights g~_{p,q}(alpha) via one backward 2-D FFT of size
// (alpha Nd, alpha Kd); output is the (Nd, Kd) block in FFT index order.
std::vector<double> weights_physical(const Grid& g, const ModelParams& p, double dtau, int alpha);

// dw dr sum |min(g~,0)|; equals the per-(n,k) defect by periodicity of g~.
double monotonicity_defect(const Grid& g, const std::vector<double>& g_phys);

// Alpha-doubling selection loop; accepts the first alpha in {2,4,...} with
// |test1| < eps dtau/T and test2 = dw dr sum |g(alpha)-g(alpha/2)| < eps1,
// then emits the Fourier-domain weights (dw dr times the forward DFT of g~).
KernelWeights select_weights(const Grid& g, const ModelParams& p, double dtau, double eps,
                             double eps1, int alpha_cap = 64);

}  // namespace gmwb
