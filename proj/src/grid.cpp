#include "gmwb/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gmwb {

namespace {

bool power_of_two(int x) { return x > 0 && (x & (x - 1)) == 0; }

[[noreturn]] void fail(const std::string& what) { throw grid_condition_error(what); }

}  // namespace

GridConfig preset_level(int level, double T) {
    if (level < 0 || level > 10) fail("grid: refinement level out of range [0,10]");
    GridConfig cfg;
    cfg.level = level;
    cfg.n_w = 1 << (9 + level);
    cfg.n_r = 1 << (5 + level);
    cfg.n_a = 25 * (1 << level) + 1;
    cfg.n_tau = std::max(1, (int)std::lround(4.0 * T)) << level;
    return cfg;
}

int Grid::a_cell(double x, double* frac) const {
    if (x <= a.front()) {
        *frac = 0.0;
        return 0;
    }
    if (x >= a.back()) {
        *frac = 1.0;
        return J - 1;
    }
    int q = int(std::upper_bound(a.begin(), a.end(), x) - a.begin()) - 1;
    q = std::min(q, J - 1);
    *frac = (x - a[q]) / (a[q + 1] - a[q]);
    return q;
}

Grid build_grid(const GridConfig& cfg, const Contract& contract) {
    contract.validate();
    GridConfig base = preset_level(cfg.level, contract.maturity);
    Grid g;
    g.N = cfg.n_w > 0 ? cfg.n_w : base.n_w;
    g.K = cfg.n_r > 0 ? cfg.n_r : base.n_r;
    g.J = cfg.n_a > 0 ? cfg.n_a : base.n_a;
    g.M = cfg.n_tau > 0 ? cfg.n_tau : base.n_tau;
    g.T = contract.maturity;

    if (!power_of_two(g.N) || !power_of_two(g.K))
        fail("grid: N and K must be powers of two");
    if (g.J < 1 || g.M < 1) fail("grid: J >= 1 and M >= 1 required");
    const int pf = cfg.padding_factor;
    if (pf < 2 || (pf & 1)) fail("grid: padding_factor must be an even integer >= 2");

    const double lz0 = std::log(contract.premium);
    g.w_min = (cfg.w_min == 0.0 && cfg.w_max == 0.0) ? lz0 - 10.0 : cfg.w_min;
    g.w_max = (cfg.w_min == 0.0 && cfg.w_max == 0.0) ? lz0 + 10.0 : cfg.w_max;
    g.r_min = cfg.r_min;
    g.r_max = cfg.r_max;

    if (!(g.w_min < lz0 && lz0 < g.w_max)) fail("grid: w_min < ln z0 < w_max required");
    if (!(g.r_min < 0.0 && 0.0 < g.r_max)) fail("grid: r_min < 0 < r_max required");

    g.Nd = pf * g.N;
    g.Kd = pf * g.K;
    const double P = g.w_max - g.w_min, Q = g.r_max - g.r_min;
    g.wd_min = g.w_min - 0.5 * (pf - 1) * P;
    g.wd_max = g.w_max + 0.5 * (pf - 1) * P;
    g.rd_min = g.r_min - 0.5 * (pf - 1) * Q;
    g.rd_max = g.r_max + 0.5 * (pf - 1) * Q;
    g.dw = P / g.N;
    g.dr = Q / g.K;
    g.dtau = g.T / g.M;
    g.w_hat0 = 0.5 * (g.w_min + g.w_max);
    g.r_hat0 = 0.5 * (g.r_min + g.r_max);

    if (!(1.0 + g.dtau * g.r_min > 0.0)) {
        std::ostringstream os;
        os << "grid: condition 1 + dtau*r_min > 0 violated: 1 + " << g.dtau << " * " << g.r_min
           << " = " << 1.0 + g.dtau * g.r_min;
        fail(os.str());
    }

    // a-partition
    g.a.resize(g.J + 1);
    const double z0 = contract.premium;
    if (cfg.a_spacing == ASpacing::Uniform) {
        for (int j = 0; j <= g.J; ++j) g.a[j] = z0 * double(j) / g.J;
    } else {
        const double q = cfg.a_geometric_ratio;
        if (!(q > 1.0)) fail("grid: geometric a-spacing requires ratio > 1");
        // cell widths c*q^j, clustered near a=0
        const double denom = (std::pow(q, g.J) - 1.0) / (q - 1.0);
        double acc = 0.0;
        g.a[0] = 0.0;
        for (int j = 1; j <= g.J; ++j) {
            acc += std::pow(q, j - 1) / denom;
            g.a[j] = z0 * acc;
        }
        g.a[g.J] = z0;
    }
    g.da_max = 0.0;
    g.da_min = z0;
    for (int j = 0; j < g.J; ++j) {
        const double d = g.a[j + 1] - g.a[j];
        g.da_max = std::max(g.da_max, d);
        g.da_min = std::min(g.da_min, d);
    }

    const double gap = std::exp(g.w_min) - std::exp(g.wd_min);
    g.w_min_condition_ok = gap >= contract.withdraw_rate * g.dtau;
    if (!g.w_min_condition_ok) {
        std::ostringstream os;
        os << "exp(w_min) - exp(wd_min) = " << gap << " < C_r*dtau = "
           << contract.withdraw_rate * g.dtau;
        g.w_min_condition_note = os.str();
    }
    return g;
}

SubdomainTag classify(const Grid& g, int n, int k) {
    if (n < -g.Nd / 2 || n > g.Nd / 2 - 1 || k < -g.Kd / 2 || k > g.Kd / 2 - 1)
        throw std::out_of_range("classify: (n,k) outside the padded lattice");
    const bool k_interior = (k >= -g.K / 2 + 1 && k <= g.K / 2 - 1);
    if (!k_interior) return SubdomainTag::Corner;
    if (n <= -g.N / 2) return SubdomainTag::LeftPad;
    if (n >= g.N / 2) return SubdomainTag::RightPad;
    return SubdomainTag::Interior;
}

}  // namespace gmwb
