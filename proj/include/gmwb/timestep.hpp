#pragma once

#include <fftw3.h>

#include <optional>
#include <vector>

#include "gmwb/controls.hpp"
#include "gmwb/interp.hpp"
#include "gmwb/kernel.hpp"

namespace gmwb {

// Net cash received for a withdrawal of gamma decided at one intervention time:
// gamma itself up to the continuous cap C_r dtau, penalized above it.
double cashflow_f(double gamma, const Contract& contract, double dtau);

// One admissible withdrawal: post-withdrawal guarantee level a' sits in a-cell
// q at fraction fa (fa == 0 on nodes).
struct Candidate {
    double gamma;
    double cash;  // f(gamma)
    int q;
    double fa;
    bool local;  // branch (1): gamma in [0, a_j ^ C_r dtau]; else branch (2)
};

struct CandidatePolicy {
    int n_loc = 8;  // uniform candidates on the local interval
    int n_ref = 4;  // subdivisions of each a-cell on the nonlocal interval
};

// Candidate sets per guarantee level j; [j] holds local then nonlocal entries.
std::vector<std::vector<Candidate>> build_candidates(const Grid& g, const Contract& contract,
                                                     const CandidatePolicy& pol);

// Scratch space for one slice pipeline (intervention + SL + FFT convolution).
struct StepWorkspace {
    explicit StepWorkspace(const Grid& g);
    ~StepWorkspace();
    StepWorkspace(const StepWorkspace&) = delete;
    StepWorkspace& operator=(const StepWorkspace&) = delete;

    const Grid* grid;
    std::vector<double> b1, b2;      // intervention results merged over v^m pads
    std::vector<double> f1, f2;      // SL-shifted conv inputs / conv outputs
    std::vector<double> val1, val2;  // compact interior intervention values
    std::vector<float> g1, g2;       // compact interior argmax withdrawals
    std::vector<int> widx;           // w-cell table for one candidate
    std::vector<double> wfrac;
    std::vector<double> ew;  // exp(w_i), i in [0, Nd)

    double* fft_real = nullptr;
    fftw_complex* fft_cplx = nullptr;
    fftw_plan plan_fwd = nullptr;  // r2c, (Nd, Kd)
    fftw_plan plan_bwd = nullptr;  // c2r
};

// Withdrawal optimization on the interior of slice j (both branches).
// b1/b2 must enter holding a copy of the v^m slice; their interior is replaced
// by the branch suprema.  When track_controls is set, the compact argmax arrays
// ws.g1/ws.g2 are filled alongside.
void intervene_interior(const ValueField& v_m, int j, const std::vector<Candidate>& cands,
                        bool nonlocal_nonempty, StepWorkspace& ws, bool track_controls);

// Semi-Lagrangian shift with rate discounting: interior nodes of `out` receive
// the discounted bilinear interpolant of `in` at the departure points; all
// other nodes of `out` are left untouched (they carry the time-tau_m values).
void sl_shift(const double* in, double* out, const Grid& g, const ModelParams& p, double dtau);

// Circular 2-D convolution with the kernel weights via real FFTs, in place on
// ws.f1/ws.f2 (`which` selects the buffer).  Padding-region outputs are
// discarded by the caller.
void convolve(StepWorkspace& ws, const KernelWeights& kw, int which);

// Reference convolution via complex transforms; asserts the imaginary residue
// below 1e-10 * ||field||_inf before dropping it.  Used by tests.
std::vector<double> convolve_ref(const Grid& g, const std::vector<double>& slice,
                                 const KernelWeights& kw);

// Pointwise branch max on the interior; picks the winning branch's withdrawal
// (ties to the local branch) into `controls` when provided.
void combine_max(const StepWorkspace& ws, bool nonlocal_nonempty, int j, double* v_next_slice,
                 ControlField* controls);

}  // namespace gmwb
