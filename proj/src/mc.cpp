#include "gmwb/mc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gmwb {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

PathRng::PathRng(std::uint64_t seed, std::uint64_t path)
    : eng(splitmix64(seed ^ splitmix64(path + 0x51ed270b7a03b2e8ULL))) {}

double PathRng::uniform() {
    // 53-bit mantissa in (0,1); never exactly 0
    return (double(eng() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

double PathRng::normal() {
    if (have_spare) {
        have_spare = false;
        return spare;
    }
    const double u1 = uniform(), u2 = uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 6.283185307179586477 * u2;
    spare = rad * std::sin(ang);
    have_spare = true;
    return rad * std::cos(ang);
}

int PathRng::poisson(double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    double prod = uniform();
    int n = 0;
    while (prod > limit) {
        prod *= uniform();
        ++n;
    }
    return n;
}

double vasicek_step(double r, double dt, const ModelParams& p, double z_draw) {
    if (!(dt > 0.0)) throw std::invalid_argument("vasicek_step: dt > 0 required");
    const double e = std::exp(-p.delta * dt);
    const double var = p.sigma_r * p.sigma_r * (-std::expm1(-2.0 * p.delta * dt)) / (2.0 * p.delta);
    return p.theta + (r - p.theta) * e + std::sqrt(var) * z_draw;
}

double sub_account_step(double z, double r, double dt, const ModelParams& p, double z_r,
                        double z_perp, double jump_mult, double withdraw_amount) {
    if (z <= 0.0) return 0.0;
    const double kappa = jump_kappa(p.jump);
    const double drift = (r - p.beta - p.lambda * kappa - 0.5 * p.sigma_z * p.sigma_z) * dt;
    const double diff =
        p.sigma_z * std::sqrt(dt) * (p.rho * z_r + std::sqrt(1.0 - p.rho * p.rho) * z_perp);
    const double grown = z * std::exp(drift + diff) * jump_mult;
    return std::max(grown - withdraw_amount, 0.0);
}

namespace {

struct PathState {
    double z, a, r;
    double disc_exponent = 0.0;  // integral of r dt, left endpoint rule
    double cash = 0.0;           // discounted cash received so far
    double cont_rate = 0.0;      // active continuous withdrawal rate
};

double jump_multiplier(const ModelParams& p, PathRng& rng, int count) {
    double lny = 0.0;
    for (int i = 0; i < count; ++i) {
        if (const auto* m = std::get_if<MertonJump>(&p.jump)) {
            lny += m->nu + m->varsigma * rng.normal();
        } else if (const auto* k = std::get_if<KouJump>(&p.jump)) {
            const double u = rng.uniform();
            const double e = -std::log(rng.uniform());
            lny += (u < k->p_up) ? e / k->eta1 : -e / k->eta2;
        }
    }
    return std::exp(lny);
}

}  // namespace

McResult replay(const Solution& sol, const McConfig& cfg) {
    if (sol.controls.empty())
        throw controls_missing_error("replay: solve was run without store_controls");
    if (cfg.n_paths < 100) throw std::invalid_argument("mc: n_paths >= 100 required");
    if (cfg.substeps < 1) throw std::invalid_argument("mc: substeps >= 1 required");

    const Grid& g = *sol.grid;
    const ModelParams& p = sol.params;
    const Contract& ct = sol.contract;
    const double dt = g.dtau / cfg.substeps;
    const double cap = ct.withdraw_rate * g.dtau;
    const bool jumps = !jump_is_none(p.jump) && p.lambda > 0.0;

    const int n_units = cfg.antithetic ? cfg.n_paths / 2 : cfg.n_paths;
    const int per_unit = cfg.antithetic ? 2 : 1;

    double sum = 0.0, sum2 = 0.0;
    std::vector<PathState> st(per_unit);
    for (int u = 0; u < n_units; ++u) {
        PathRng rng(cfg.seed, std::uint64_t(u));
        for (auto& s : st) s = PathState{ct.premium, ct.premium, p.r0, 0.0, 0.0, 0.0};

        for (int mp = 1; mp <= g.M; ++mp) {
            for (int ss = 0; ss < cfg.substeps; ++ss) {
                const double zr = rng.normal();
                const double zp = rng.normal();
                double jm = 1.0;
                if (jumps) jm = jump_multiplier(p, rng, rng.poisson(p.lambda * dt));
                for (int q = 0; q < per_unit; ++q) {
                    PathState& s = st[q];
                    const double sgn = (q == 0) ? 1.0 : -1.0;
                    s.disc_exponent += s.r * dt;
                    double dw = 0.0;
                    if (s.cont_rate > 0.0 && s.a > 0.0) {
                        dw = std::min(s.cont_rate * dt, s.a);
                        s.cash += std::exp(-s.disc_exponent) * dw;
                        s.a -= dw;
                    }
                    s.z = sub_account_step(s.z, s.r, dt, p, sgn * zr, sgn * zp, jm,
                                           s.z > 0.0 ? dw : 0.0);
                    s.r = vasicek_step(s.r, dt, p, sgn * zr);
                }
            }
            // Withdrawal decision at t_{m'} from the controls of PDE step M - m'.
            const ControlField& cf = sol.controls[g.M - mp];
            for (auto& s : st) {
                const double w = s.z > 0.0 ? std::log(s.z) : g.wd_min;
                const double gam = interp_control(cf, w, s.r, s.a);
                if (gam <= 0.0) {
                    s.cont_rate = 0.0;
                    continue;
                }
                if (gam > cap) {  // finite amount, applied instantly
                    const double gamma = std::min(gam, s.a);
                    s.cash += std::exp(-s.disc_exponent) * cashflow_f(gamma, ct, g.dtau);
                    s.a -= gamma;
                    s.z = std::max(s.z - gamma, 0.0);
                    s.cont_rate = 0.0;
                } else if (mp < g.M) {  // continuous rate over the next interval
                    s.cont_rate = gam / g.dtau;
                } else {  // no interval remains; take the amount at maturity
                    const double gamma = std::min(gam, s.a);
                    s.cash += std::exp(-s.disc_exponent) * gamma;
                    s.a -= gamma;
                    s.z = std::max(s.z - gamma, 0.0);
                    s.cont_rate = 0.0;
                }
            }
        }
        double unit = 0.0;
        for (auto& s : st) {
            const double terminal =
                std::max(s.z, (1.0 - ct.penalty) * s.a - ct.fixed_cost);
            unit += s.cash + std::exp(-s.disc_exponent) * terminal;
        }
        unit /= per_unit;
        sum += unit;
        sum2 += unit * unit;
    }

    McResult res;
    res.n_paths = n_units * per_unit;
    res.mean = sum / n_units;
    const double var = std::max(0.0, (sum2 - sum * sum / n_units) / (n_units - 1));
    res.std_error = std::sqrt(var / n_units);
    res.ci_low = res.mean - 1.959963984540054 * res.std_error;
    res.ci_high = res.mean + 1.959963984540054 * res.std_error;
    return res;
}

}  // namespace gmwb
