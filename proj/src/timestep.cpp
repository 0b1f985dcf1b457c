#include "gmwb/timestep.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace gmwb {

double cashflow_f(double gamma, const Contract& contract, double dtau) {
    const double cap = contract.withdraw_rate * dtau;
    if (gamma <= cap) return gamma;
    return gamma * (1.0 - contract.penalty) + contract.penalty * cap - contract.fixed_cost;
}

std::vector<std::vector<Candidate>> build_candidates(const Grid& g, const Contract& contract,
                                                     const CandidatePolicy& pol) {
    if (pol.n_loc < 2 || pol.n_ref < 1)
        throw std::invalid_argument("candidates: n_loc >= 2 and n_ref >= 1 required");
    const double cap = contract.withdraw_rate * g.dtau;
    std::vector<std::vector<Candidate>> out(g.J + 1);
    for (int j = 0; j <= g.J; ++j) {
        const double aj = g.a[j];
        auto& cs = out[j];
        auto push = [&](double gamma, bool local) {
            double fa;
            const int q = g.a_cell(aj - gamma, &fa);
            cs.push_back({gamma, cashflow_f(gamma, contract, g.dtau), q, fa, local});
        };
        if (aj <= 0.0) {
            push(0.0, true);
            continue;
        }
        const double gmax = std::min(aj, cap);
        for (int t = 0; t < pol.n_loc; ++t) push(gmax * t / (pol.n_loc - 1), true);
        if (aj > cap) {
            const double amax = aj - cap;  // post-withdrawal level must stay below this
            for (int q = 0; q < g.J && g.a[q] < amax; ++q) {
                push(aj - g.a[q], false);
                const double da = g.a[q + 1] - g.a[q];
                for (int t = 1; t < pol.n_ref; ++t) {
                    const double ap = g.a[q] + da * t / pol.n_ref;
                    if (ap >= amax) break;
                    push(aj - ap, false);
                }
            }
        }
    }
    return out;
}

StepWorkspace::StepWorkspace(const Grid& g) : grid(&g) {
    const std::size_t sz = g.slice_size();
    b1.resize(sz);
    b2.resize(sz);
    f1.resize(sz);
    f2.resize(sz);
    const std::size_t in = std::size_t(g.n_interior_w()) * g.n_interior_r();
    val1.resize(in);
    val2.resize(in);
    g1.resize(in);
    g2.resize(in);
    widx.resize(g.n_interior_w());
    wfrac.resize(g.n_interior_w());
    ew.resize(g.Nd);
    for (int i = 0; i < g.Nd; ++i) ew[i] = std::exp(g.w_of(i));
    fft_real = fftw_alloc_real(sz);
    fft_cplx = fftw_alloc_complex(std::size_t(g.Nd) * (g.Kd / 2 + 1));
    if (!fft_real || !fft_cplx) throw std::bad_alloc();
    plan_fwd = fftw_plan_dft_r2c_2d(g.Nd, g.Kd, fft_real, fft_cplx, FFTW_ESTIMATE);
    plan_bwd = fftw_plan_dft_c2r_2d(g.Nd, g.Kd, fft_cplx, fft_real, FFTW_ESTIMATE);
}

StepWorkspace::~StepWorkspace() {
    fftw_destroy_plan(plan_fwd);
    fftw_destroy_plan(plan_bwd);
    fftw_free(fft_real);
    fftw_free(fft_cplx);
}

namespace {

// Candidate evaluation over the interior block.  Values are accumulated into
// compact [iwc][ikc] arrays so the running maxima stay cache-resident across
// the whole candidate sweep of a slice.
template <bool WithControls>
void sweep_candidates(const ValueField& v_m, int j, const std::vector<Candidate>& cands,
                      StepWorkspace& ws) {
    const Grid& g = *v_m.grid;
    const int iw0 = g.iw_lo(), nw = g.n_interior_w();
    const int ik0 = g.ik_lo(), nk = g.n_interior_r();
    const int Kd = g.Kd;
    const double ew_min = std::exp(g.wd_min);

    std::fill(ws.val1.begin(), ws.val1.end(), -HUGE_VAL);
    std::fill(ws.val2.begin(), ws.val2.end(), -HUGE_VAL);
    if (WithControls) {
        std::fill(ws.g1.begin(), ws.g1.end(), 0.0f);
        std::fill(ws.g2.begin(), ws.g2.end(), 0.0f);
    }

    for (const Candidate& c : cands) {
        // w-cell table, shared across all rate columns
        if (c.gamma == 0.0) {
            for (int t = 0; t < nw; ++t) {
                ws.widx[t] = iw0 + t;
                ws.wfrac[t] = 0.0;
            }
        } else {
            for (int t = 0; t < nw; ++t) {
                const double x = ws.ew[iw0 + t] - c.gamma;
                if (x <= ew_min) {
                    ws.widx[t] = 0;
                    ws.wfrac[t] = 0.0;
                } else {
                    const double u = (std::log(x) - g.wd_min) / g.dw;
                    int i = int(u);
                    i = std::min(i, g.Nd - 2);
                    ws.widx[t] = i;
                    ws.wfrac[t] = u - i;
                }
            }
        }
        const double* lo = v_m.slice(c.q);
        const double* hi = v_m.slice(c.q + 1);
        const double fa = c.fa, cash = c.cash;
        double* val = c.local ? ws.val1.data() : ws.val2.data();
        float* gam = c.local ? ws.g1.data() : ws.g2.data();
        const float gf = float(c.gamma);

        for (int t = 0; t < nw; ++t) {
            const std::size_t r0 = std::size_t(ws.widx[t]) * Kd + ik0;
            const std::size_t r1 = r0 + Kd;
            const double fw = ws.wfrac[t];
            double* vrow = val + std::size_t(t) * nk;
            float* grow = gam + std::size_t(t) * nk;
            if (fa == 0.0) {
                const double* p0 = lo + r0;
                const double* p1 = lo + r1;
                for (int kc = 0; kc < nk; ++kc) {
                    const double v = (1.0 - fw) * p0[kc] + fw * p1[kc] + cash;
                    if (v > vrow[kc]) {
                        vrow[kc] = v;
                        if (WithControls) grow[kc] = gf;
                    }
                }
            } else {
                const double* p0 = lo + r0;
                const double* p1 = lo + r1;
                const double* q0 = hi + r0;
                const double* q1 = hi + r1;
                for (int kc = 0; kc < nk; ++kc) {
                    const double vl = (1.0 - fw) * p0[kc] + fw * p1[kc];
                    const double vh = (1.0 - fw) * q0[kc] + fw * q1[kc];
                    const double v = (1.0 - fa) * vl + fa * vh + cash;
                    if (v > vrow[kc]) {
                        vrow[kc] = v;
                        if (WithControls) grow[kc] = gf;
                    }
                }
            }
        }
    }
}

}  // namespace

void intervene_interior(const ValueField& v_m, int j, const std::vector<Candidate>& cands,
                        bool nonlocal_nonempty, StepWorkspace& ws, bool track_controls) {
    const Grid& g = *v_m.grid;
    if (track_controls)
        sweep_candidates<true>(v_m, j, cands, ws);
    else
        sweep_candidates<false>(v_m, j, cands, ws);

    const int iw0 = g.iw_lo(), nw = g.n_interior_w();
    const int ik0 = g.ik_lo(), nk = g.n_interior_r();
    for (int t = 0; t < nw; ++t) {
        double* row1 = ws.b1.data() + std::size_t(iw0 + t) * g.Kd + ik0;
        std::memcpy(row1, ws.val1.data() + std::size_t(t) * nk, nk * sizeof(double));
        if (nonlocal_nonempty) {
            double* row2 = ws.b2.data() + std::size_t(iw0 + t) * g.Kd + ik0;
            std::memcpy(row2, ws.val2.data() + std::size_t(t) * nk, nk * sizeof(double));
        }
    }
}

void sl_shift(const double* in, double* out, const Grid& g, const ModelParams& p, double dtau) {
    const int iw0 = g.iw_lo(), iw1 = g.iw_hi();
    const int ik0 = g.ik_lo(), ik1 = g.ik_hi();
    const int Kd = g.Kd;
    const double growth = std::expm1(dtau);
    const double decay = std::exp(-p.delta * dtau);

    const int nk = ik1 - ik0 + 1;
    std::vector<int> off(nk), kcell(nk);
    std::vector<double> fw(nk), gr(nk), disc(nk);
    for (int kc = 0; kc < nk; ++kc) {
        const double rk = g.r_of(ik0 + kc);
        const double s = (rk - 0.5 * p.sigma_z * p.sigma_z - p.beta) * growth;
        if (!std::isfinite(s)) throw std::runtime_error("sl_shift: non-finite departure shift");
        const double u = s / g.dw;
        double o = std::floor(u);
        off[kc] = int(o);
        fw[kc] = u - o;
        const double rb = p.theta + (rk - p.theta) * decay;
        double tr = (rb - g.rd_min) / g.dr;
        tr = std::clamp(tr, 0.0, double(g.Kd - 1));
        int kd = std::min(int(tr), g.Kd - 2);
        kcell[kc] = kd;
        gr[kc] = tr - kd;
        disc[kc] = 1.0 / (1.0 + dtau * rk);
    }

    for (int iw = iw0; iw <= iw1; ++iw) {
        double* orow = out + std::size_t(iw) * Kd;
        for (int kc = 0; kc < nk; ++kc) {
            int i0 = iw + off[kc];
            i0 = std::clamp(i0, 0, g.Nd - 2);
            const double* a = in + std::size_t(i0) * Kd + kcell[kc];
            const double* b = a + Kd;
            const double vl = (1.0 - gr[kc]) * a[0] + gr[kc] * a[1];
            const double vh = (1.0 - gr[kc]) * b[0] + gr[kc] * b[1];
            orow[ik0 + kc] = disc[kc] * ((1.0 - fw[kc]) * vl + fw[kc] * vh);
        }
    }
}

void convolve(StepWorkspace& ws, const KernelWeights& kw, int which) {
    const Grid& g = *ws.grid;
    double* f = (which == 1 ? ws.f1 : ws.f2).data();
    std::memcpy(ws.fft_real, f, g.slice_size() * sizeof(double));
    fftw_execute(ws.plan_fwd);
    const int Kh = g.Kd / 2 + 1;
    const double scale = 1.0 / (double(g.Nd) * g.Kd);
    for (std::size_t i = 0, n = std::size_t(g.Nd) * Kh; i < n; ++i) {
        const std::complex<double> x(ws.fft_cplx[i][0], ws.fft_cplx[i][1]);
        const std::complex<double> y = x * kw.G_half[i] * scale;
        ws.fft_cplx[i][0] = y.real();
        ws.fft_cplx[i][1] = y.imag();
    }
    fftw_execute(ws.plan_bwd);
    std::memcpy(f, ws.fft_real, g.slice_size() * sizeof(double));
}

std::vector<double> convolve_ref(const Grid& g, const std::vector<double>& slice,
                                 const KernelWeights& kw) {
    if (slice.size() != g.slice_size())
        throw std::invalid_argument("convolve_ref: slice dimension mismatch");
    const std::size_t n = g.slice_size();
    fftw_complex* buf = fftw_alloc_complex(n);
    if (!buf) throw std::bad_alloc();
    for (std::size_t i = 0; i < n; ++i) {
        buf[i][0] = slice[i];
        buf[i][1] = 0.0;
    }
    fftw_plan fwd = fftw_plan_dft_2d(g.Nd, g.Kd, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(fwd);
    fftw_destroy_plan(fwd);
    const double scale = 1.0 / (double(g.Nd) * g.Kd);
    for (std::size_t i = 0; i < n; ++i) {
        std::complex<double> x(buf[i][0], buf[i][1]);
        x *= kw.G_full[i] * scale;
        buf[i][0] = x.real();
        buf[i][1] = x.imag();
    }
    fftw_plan bwd = fftw_plan_dft_2d(g.Nd, g.Kd, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(bwd);
    fftw_destroy_plan(bwd);
    double amax = 0.0, imax = 0.0;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = buf[i][0];
        amax = std::max(amax, std::fabs(buf[i][0]));
        imax = std::max(imax, std::fabs(buf[i][1]));
    }
    fftw_free(buf);
    if (imax > 1e-10 * std::max(1.0, amax))
        throw std::runtime_error("convolve_ref: imaginary residue exceeds tolerance");
    return out;
}

void combine_max(const StepWorkspace& ws, bool nonlocal_nonempty, int j, double* v_next_slice,
                 ControlField* controls) {
    const Grid& g = *ws.grid;
    const int iw0 = g.iw_lo(), nw = g.n_interior_w();
    const int ik0 = g.ik_lo(), nk = g.n_interior_r();
    for (int t = 0; t < nw; ++t) {
        const double* r1 = ws.f1.data() + std::size_t(iw0 + t) * g.Kd + ik0;
        const double* r2 = ws.f2.data() + std::size_t(iw0 + t) * g.Kd + ik0;
        double* o = v_next_slice + std::size_t(iw0 + t) * g.Kd + ik0;
        for (int kc = 0; kc < nk; ++kc) {
            const bool take2 = nonlocal_nonempty && r2[kc] > r1[kc];
            o[kc] = take2 ? r2[kc] : r1[kc];
            if (controls) {
                const float gam =
                    take2 ? ws.g2[std::size_t(t) * nk + kc] : ws.g1[std::size_t(t) * nk + kc];
                WithdrawBranch b = WithdrawBranch::None;
                if (take2)
                    b = WithdrawBranch::FiniteAmount;
                else if (gam > 0.0f)
                    b = WithdrawBranch::ContinuousRate;
                controls->set(j, iw0 + t, ik0 + kc, gam, b);
            }
        }
    }
}

}  // namespace gmwb
