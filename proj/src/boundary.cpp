#include "gmwb/boundary.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace gmwb {

std::vector<double> TridiagonalSystem::solve() const {
    const std::size_t n = diag.size();
    std::vector<double> c(n), d(n), x(n);
    double piv = diag[0];
    if (!(piv > 0.0)) throw std::runtime_error("tridiagonal: non-positive pivot");
    c[0] = super[0] / piv;
    d[0] = rhs[0] / piv;
    for (std::size_t i = 1; i < n; ++i) {
        piv = diag[i] - sub[i] * c[i - 1];
        if (!(piv > 0.0)) throw std::runtime_error("tridiagonal: non-positive pivot");
        c[i] = super[i] / piv;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / piv;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

ValueField initial_condition(const Grid& g, const Contract& contract) {
    ValueField f(g, 0);
    std::vector<double> ew(g.Nd);
    for (int i = 0; i < g.Nd; ++i) ew[i] = std::exp(g.w_of(i));
    for (int j = 0; j <= g.J; ++j) {
        const double floor_j = (1.0 - contract.penalty) * g.a[j] - contract.fixed_cost;
        double* s = f.slice(j);
        for (int iw = 0; iw < g.Nd; ++iw) {
            const double v = std::max(ew[iw], floor_j);
            double* row = s + std::size_t(iw) * g.Kd;
            for (int ik = 0; ik < g.Kd; ++ik) row[ik] = v;
        }
    }
    return f;
}

void apply_wmax(ValueField& f, const Contract&, const ModelParams& p, double tau) {
    const Grid& g = *f.grid;
    const double disc = std::exp(-p.beta * tau);
    const int ik0 = g.ik_lo(), ik1 = g.ik_hi();
    for (int j = 0; j <= g.J; ++j) {
        double* s = f.slice(j);
        for (int iw = g.iw_hi() + 1; iw < g.Nd; ++iw) {
            const double v = disc * std::exp(g.w_of(iw));
            double* row = s + std::size_t(iw) * g.Kd;
            for (int ik = ik0; ik <= ik1; ++ik) row[ik] = v;
        }
    }
}

void apply_corner(ValueField& f, const ModelParams& p, const Contract& contract, double tau) {
    const Grid& g = *f.grid;
    const double cap = std::exp(g.wd_max);
    const int ik0 = g.ik_lo(), ik1 = g.ik_hi();
    std::vector<double> pb(g.Kd);
    for (int ik = 0; ik < g.Kd; ++ik) {
        if (ik >= ik0 && ik <= ik1) continue;
        const double rbar = std::clamp(g.r_of(ik), g.r_min, g.r_max);
        pb[ik] = bond_price(p, rbar, tau);
    }
    for (int j = 0; j <= g.J; ++j) {
        const double floor_j = (1.0 - contract.penalty) * g.a[j] - contract.fixed_cost;
        double* s = f.slice(j);
        for (int iw = 0; iw < g.Nd; ++iw) {
            const double payoff = std::min(std::max(std::exp(g.w_of(iw)), floor_j), cap);
            double* row = s + std::size_t(iw) * g.Kd;
            for (int ik = 0; ik < ik0; ++ik) row[ik] = pb[ik] * payoff;
            for (int ik = ik1 + 1; ik < g.Kd; ++ik) row[ik] = pb[ik] * payoff;
        }
    }
}

std::pair<double, double> positive_coeffs(const ModelParams& p, double r_k, double dr) {
    const double diff = 0.5 * p.sigma_r * p.sigma_r / (dr * dr);
    const double drift = p.delta * (p.theta - r_k);
    double alpha = diff - 0.5 * drift / dr;
    double beta = diff + 0.5 * drift / dr;
    if (alpha < 0.0 || beta < 0.0) {
        if (drift > 0.0) {
            alpha = diff;
            beta = diff + drift / dr;
        } else {
            alpha = diff - drift / dr;
            beta = diff;
        }
    }
    return {alpha, beta};
}

void step_wmin(const ValueField& v_m, int j, const std::vector<Candidate>& cands,
               const ModelParams& p, const Contract& contract, double tau_next,
               double* v_next_slice, ControlField* controls) {
    const Grid& g = *v_m.grid;
    const int nw = g.left_pad_count();  // iw in [0, nw)
    const int ik0 = g.ik_lo(), ik1 = g.ik_hi();
    const int nk = ik1 - ik0 + 1;

    // Intervention with a-only interpolation (w unchanged since exp(w) ~ 0).
    std::vector<double> best(std::size_t(nw) * nk, -HUGE_VAL);
    std::vector<float> garg(controls ? best.size() : 0, 0.0f);
    for (const Candidate& c : cands) {
        const double* lo = v_m.slice(c.q);
        const double* hi = v_m.slice(c.q + 1);
        for (int iw = 0; iw < nw; ++iw) {
            const double* plo = lo + std::size_t(iw) * g.Kd + ik0;
            const double* phi = hi + std::size_t(iw) * g.Kd + ik0;
            double* brow = best.data() + std::size_t(iw) * nk;
            float* grow = controls ? garg.data() + std::size_t(iw) * nk : nullptr;
            for (int kc = 0; kc < nk; ++kc) {
                const double v = (c.fa == 0.0 ? plo[kc] : (1.0 - c.fa) * plo[kc] + c.fa * phi[kc]) +
                                 c.cash;
                if (v > brow[kc]) {
                    brow[kc] = v;
                    if (controls) grow[kc] = float(c.gamma);
                }
            }
        }
    }

    // Fully implicit step of L_d; Dirichlet closures from the corner values.
    const double dtau = g.dtau;
    const double cap = std::exp(g.wd_max);
    const double floor_j = (1.0 - contract.penalty) * g.a[j] - contract.fixed_cost;
    const double pb_lo = bond_price(p, std::clamp(g.r_of(ik0 - 1), g.r_min, g.r_max), tau_next);
    const double pb_hi = bond_price(p, std::clamp(g.r_of(ik1 + 1), g.r_min, g.r_max), tau_next);

    TridiagonalSystem sys;
    sys.sub.resize(nk);
    sys.diag.resize(nk);
    sys.super.resize(nk);
    sys.rhs.resize(nk);
    for (int kc = 0; kc < nk; ++kc) {
        const double rk = g.r_of(ik0 + kc);
        const auto [alpha, beta] = positive_coeffs(p, rk, g.dr);
        sys.sub[kc] = -dtau * alpha;
        sys.diag[kc] = 1.0 + dtau * (alpha + beta + rk);
        sys.super[kc] = -dtau * beta;
    }
    const double a0 = -sys.sub[0], b1 = -sys.super[nk - 1];

    for (int iw = 0; iw < nw; ++iw) {
        const double payoff = std::min(std::max(std::exp(g.w_of(iw)), floor_j), cap);
        for (int kc = 0; kc < nk; ++kc) sys.rhs[kc] = best[std::size_t(iw) * nk + kc];
        sys.rhs[0] += a0 * pb_lo * payoff;
        sys.rhs[nk - 1] += b1 * pb_hi * payoff;
        const std::vector<double> x = sys.solve();
        double* row = v_next_slice + std::size_t(iw) * g.Kd;
        for (int kc = 0; kc < nk; ++kc) row[ik0 + kc] = x[kc];
        if (controls) {
            const double capw = contract.withdraw_rate * dtau;
            for (int kc = 0; kc < nk; ++kc) {
                const float gam = garg[std::size_t(iw) * nk + kc];
                WithdrawBranch b = WithdrawBranch::None;
                if (gam > 0.0f)
                    b = gam <= capw ? WithdrawBranch::ContinuousRate : WithdrawBranch::FiniteAmount;
                controls->set(j, iw, ik0 + kc, gam, b);
            }
        }
    }
}

}  // namespace gmwb
