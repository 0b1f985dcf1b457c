#include "gmwb/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <memory>
#include <sstream>
#include <thread>

namespace gmwb {

namespace {

double field_max_abs(const ValueField& f) {
    double m = 0.0;
    for (double x : f.v) m = std::max(m, std::fabs(x));
    return m;
}

struct StepContext {
    const Grid& g;
    const ModelParams& p;
    const Contract& contract;
    const KernelWeights& kernel;
    const std::vector<std::vector<Candidate>>& cands;
    double cap;
};

// One backward step: per-slice intervention -> SL shift -> convolution ->
// branch max on the interior, then the boundary updates at tau_next.
void run_step(const StepContext& ctx, const ValueField& v_m, ValueField& v_next, double tau_next,
              ControlField* cf, std::vector<std::unique_ptr<StepWorkspace>>& ws_pool) {
    const Grid& g = ctx.g;
    auto do_slice = [&](int j, StepWorkspace& ws) {
        const bool nl = g.a[j] > ctx.cap;
        const double* src = v_m.slice(j);
        std::memcpy(ws.b1.data(), src, g.slice_size() * sizeof(double));
        if (nl) std::memcpy(ws.b2.data(), src, g.slice_size() * sizeof(double));

        intervene_interior(v_m, j, ctx.cands[j], nl, ws, cf != nullptr);

        std::memcpy(ws.f1.data(), src, g.slice_size() * sizeof(double));
        sl_shift(ws.b1.data(), ws.f1.data(), g, ctx.p, g.dtau);
        convolve(ws, ctx.kernel, 1);
        if (nl) {
            std::memcpy(ws.f2.data(), src, g.slice_size() * sizeof(double));
            sl_shift(ws.b2.data(), ws.f2.data(), g, ctx.p, g.dtau);
            convolve(ws, ctx.kernel, 2);
        }
        combine_max(ws, nl, j, v_next.slice(j), cf);
        step_wmin(v_m, j, ctx.cands[j], ctx.p, ctx.contract, tau_next, v_next.slice(j), cf);
    };

    const int n_threads = int(ws_pool.size());
    if (n_threads == 1) {
        for (int j = 0; j <= g.J; ++j) do_slice(j, *ws_pool[0]);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t)
            pool.emplace_back([&, t] {
                for (int j = t; j <= g.J; j += n_threads) do_slice(j, *ws_pool[t]);
            });
        for (auto& th : pool) th.join();
    }
    apply_wmax(v_next, ctx.contract, ctx.p, tau_next);
    apply_corner(v_next, ctx.p, ctx.contract, tau_next);
}

}  // namespace

Solution solve(const Grid& g, const ModelParams& p, const Contract& contract,
               const SolveOptions& opt, const KernelWeights* kernel) {
    const auto t_start = std::chrono::steady_clock::now();
    p.validate();
    contract.validate();

    Solution sol;
    sol.grid = &g;
    sol.params = p;
    sol.contract = contract;
    sol.kernel = kernel ? *kernel : select_weights(g, p, g.dtau, opt.eps, opt.eps1, opt.alpha_cap);

    const auto cands = build_candidates(g, contract, opt.policy);
    const StepContext ctx{g, p, contract, sol.kernel, cands, contract.withdraw_rate * g.dtau};

    ValueField v_m = initial_condition(g, contract);
    ValueField v_next(g, 0);

    const int n_threads = std::max(1, std::min(opt.threads, g.J + 1));
    std::vector<std::unique_ptr<StepWorkspace>> ws_pool;
    ws_pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) ws_pool.emplace_back(std::make_unique<StepWorkspace>(g));

    const double v0_norm = field_max_abs(v_m);
    const double C = std::fabs(g.r_min) / (1.0 + g.dtau * g.r_min);
    sol.diagnostics.reserve(g.M);
    if (opt.store_controls) sol.controls.reserve(g.M);

    for (int m = 0; m < g.M; ++m) {
        const double tau_next = (m + 1) * g.dtau;
        ControlField* cf = nullptr;
        if (opt.store_controls) {
            sol.controls.emplace_back(g, m);
            cf = &sol.controls.back();
        }
        run_step(ctx, v_m, v_next, tau_next, cf, ws_pool);
        v_next.time_index = m + 1;

        // l-infinity bound, Appendix-C form; slack covers roundoff only.
        const double amp =
            std::exp(2.0 * (m + 1) * opt.eps * g.dtau / g.T) * std::exp(C * (m + 1) * g.dtau);
        StepDiagnostics d;
        for (int j = 0; j <= g.J; ++j) {
            const double* s = v_next.slice(j);
            double mx = 0.0;
            for (std::size_t i = 0; i < g.slice_size(); ++i) mx = std::max(mx, std::fabs(s[i]));
            const double bound = amp * (v0_norm + g.a[j]);
            if (mx > d.max_abs) {
                d.max_abs = mx;
                d.bound = bound;
            }
            if (opt.check_stability && !(mx <= bound * (1.0 + 1e-12))) {
                std::ostringstream os;
                os << "stability bound violated at step " << m + 1 << ", j = " << j
                   << ": max |v| = " << mx << " > " << bound;
                throw stability_error(os.str());
            }
        }
        sol.diagnostics.push_back(d);
        std::swap(v_m, v_next);
    }
    sol.final_field = std::move(v_m);
    sol.final_field.time_index = g.M;
    sol.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return sol;
}

ValueField solve_single_step(const Grid& g, const ModelParams& p, const Contract& contract,
                             const SolveOptions& opt, const KernelWeights& kernel,
                             const ValueField& v_m, double tau_next) {
    p.validate();
    contract.validate();
    const auto cands = build_candidates(g, contract, opt.policy);
    const StepContext ctx{g, p, contract, kernel, cands, contract.withdraw_rate * g.dtau};
    std::vector<std::unique_ptr<StepWorkspace>> ws_pool;
    ws_pool.emplace_back(std::make_unique<StepWorkspace>(g));
    ValueField v_next(g, v_m.time_index + 1);
    run_step(ctx, v_m, v_next, tau_next, nullptr, ws_pool);
    return v_next;
}

double price_at(const Solution& sol, double z, double r, double a) {
    if (!(z > 0.0)) throw std::invalid_argument("price_at: z > 0 required");
    return interp3(sol.final_field, std::log(z), r, a);
}

FeeResult fair_fee(const Grid& g, ModelParams p, const Contract& contract, double tol,
                   const SolveOptions& opt, double bracket_lo, double bracket_hi, int max_iter) {
    if (!(tol > 0.0)) throw std::invalid_argument("fair_fee: tol > 0 required");
    const double z0 = contract.premium;

    // The kernel does not involve beta; compute once and share across solves.
    const KernelWeights kw = select_weights(g, p, g.dtau, opt.eps, opt.eps1, opt.alpha_cap);
    auto value = [&](double beta) {
        p.beta = beta;
        const Solution s = solve(g, p, contract, opt, &kw);
        return price_at(s, z0, p.r0, z0) - z0;
    };

    double lo = bracket_lo, hi = bracket_hi;
    double flo = value(lo), fhi = value(hi);
    int iters = 2;
    if (flo * fhi > 0.0) {
        std::ostringstream os;
        os << "fair_fee: no sign change on [" << lo << ", " << hi << "]: f(lo) = " << flo
           << ", f(hi) = " << fhi;
        throw bracket_error(os.str());
    }
    double x0 = lo, f0 = flo, x1 = hi, f1 = fhi;
    while (iters < max_iter) {
        if (std::fabs(f1) < tol * z0) return {x1, iters, f1 + z0};
        if (std::fabs(f0) < tol * z0) return {x0, iters, f0 + z0};
        double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if (!std::isfinite(x2) || x2 <= lo || x2 >= hi) x2 = 0.5 * (lo + hi);
        const double f2 = value(x2);
        ++iters;
        if (flo * f2 <= 0.0) {
            hi = x2;
            fhi = f2;
        } else {
            lo = x2;
            flo = f2;
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
    }
    std::ostringstream os;
    os << "fair_fee: not converged in " << max_iter << " solves; last residual " << f1;
    throw std::runtime_error(os.str());
}

std::vector<ControlMapRow> control_map(const Solution& sol, double t, double r_spot) {
    if (sol.controls.empty())
        throw controls_missing_error("control_map: solve was run without store_controls");
    const Grid& g = *sol.grid;
    int m = int(std::lround(g.M * (1.0 - t / g.T)));
    m = std::clamp(m, 0, g.M - 1);
    const ControlField& cf = sol.controls[m];

    int k_near = g.ik_lo();
    double best = HUGE_VAL;
    for (int ik = g.ik_lo(); ik <= g.ik_hi(); ++ik) {
        const double d = std::fabs(g.r_of(ik) - r_spot);
        if (d < best) {
            best = d;
            k_near = ik;
        }
    }
    std::vector<ControlMapRow> rows;
    rows.reserve(std::size_t(cf.nw) * (g.J + 1));
    for (int iw = 0; iw < cf.nw; ++iw) {
        const double z = std::exp(g.w_of(iw));
        for (int j = 0; j <= g.J; ++j) {
            const std::size_t i = cf.idx(j, iw, k_near - g.ik_lo());
            rows.push_back({z, g.a[j], double(cf.gamma[i]), WithdrawBranch(cf.branch[i])});
        }
    }
    return rows;
}

}  // namespace gmwb
