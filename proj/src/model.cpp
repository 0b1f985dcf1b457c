#include "gmwb/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gmwb {

namespace {
constexpr double two_pi = 6.283185307179586476925286766559;

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }
}  // namespace

void validate_jump(const JumpSpec& spec) {
    if (const auto* m = std::get_if<MertonJump>(&spec)) {
        if (!(m->varsigma > 0.0)) fail("jump: Merton requires varsigma > 0");
        if (!std::isfinite(m->nu)) fail("jump: Merton nu must be finite");
    } else if (const auto* k = std::get_if<KouJump>(&spec)) {
        if (!(k->p_up >= 0.0 && k->p_up <= 1.0)) fail("jump: Kou requires p_up in [0,1]");
        if (!(k->eta1 > 1.0)) fail("jump: Kou requires eta1 > 1 (finite E[Y])");
        if (!(k->eta2 > 0.0)) fail("jump: Kou requires eta2 > 0");
    }
}

bool jump_is_none(const JumpSpec& spec) { return std::holds_alternative<NoJump>(spec); }

void ModelParams::validate() const {
    if (!(sigma_z > 0.0)) fail("model: sigma_z > 0 required");
    if (!(sigma_r >= 0.0)) fail("model: sigma_r >= 0 required");
    if (!(delta > 0.0)) fail("model: delta > 0 required");
    if (!(std::fabs(rho) < 1.0)) fail("model: |rho| < 1 required");
    if (!(lambda >= 0.0)) fail("model: lambda >= 0 required");
    if (!(beta >= 0.0)) fail("model: beta >= 0 required");
    if (!std::isfinite(theta) || !std::isfinite(r0)) fail("model: theta, r0 must be finite");
    validate_jump(jump);
}

void Contract::validate() const {
    if (!(maturity > 0.0)) fail("contract: T > 0 required");
    if (!(withdraw_rate > 0.0)) fail("contract: C_r > 0 required");
    if (!(penalty > 0.0 && penalty < 1.0)) fail("contract: 0 < mu < 1 required");
    if (!(fixed_cost > 0.0)) fail("contract: c > 0 required");
    if (!(premium > 0.0)) fail("contract: z0 > 0 required");
}

double jump_density(const JumpSpec& spec, double y) {
    if (const auto* m = std::get_if<MertonJump>(&spec)) {
        const double z = (y - m->nu) / m->varsigma;
        return std::exp(-0.5 * z * z) / (m->varsigma * std::sqrt(two_pi));
    }
    if (const auto* k = std::get_if<KouJump>(&spec)) {
        return y >= 0.0 ? k->p_up * k->eta1 * std::exp(-k->eta1 * y)
                        : (1.0 - k->p_up) * k->eta2 * std::exp(k->eta2 * y);
    }
    return 0.0;
}

std::complex<double> jump_char(const JumpSpec& spec, double eta) {
    const double w = two_pi * eta;
    if (const auto* m = std::get_if<MertonJump>(&spec)) {
        // E[exp(-2 pi i eta lnY)] for lnY ~ N(nu, varsigma^2)
        const double s = m->varsigma;
        return std::exp(std::complex<double>(-0.5 * w * w * s * s, -w * m->nu));
    }
    if (const auto* k = std::get_if<KouJump>(&spec)) {
        const std::complex<double> iw(0.0, w);
        return k->p_up * k->eta1 / (k->eta1 + iw) + (1.0 - k->p_up) * k->eta2 / (k->eta2 - iw);
    }
    return {1.0, 0.0};
}

double jump_kappa(const JumpSpec& spec) {
    if (const auto* m = std::get_if<MertonJump>(&spec))
        return std::expm1(m->nu + 0.5 * m->varsigma * m->varsigma);
    if (const auto* k = std::get_if<KouJump>(&spec)) {
        if (!(k->eta1 > 1.0)) fail("jump_kappa: Kou eta1 <= 1 gives infinite E[Y]");
        return k->p_up * k->eta1 / (k->eta1 - 1.0) + (1.0 - k->p_up) * k->eta2 / (k->eta2 + 1.0) -
               1.0;
    }
    return 0.0;
}

double bond_price(const ModelParams& p, double r, double tau) {
    if (!(tau >= 0.0)) fail("bond_price: tau >= 0 required");
    const double d = p.delta;
    const double s2 = p.sigma_r * p.sigma_r;
    const double e = -std::expm1(-d * tau);  // 1 - exp(-delta tau)
    const double B = e / d;
    return std::exp((p.theta - 0.5 * s2 / (d * d)) * (B - tau) - 0.25 * s2 / (d * d * d) * e * e -
                    r * B);
}

double comparable_rate(const ModelParams& p, double T) {
    if (!(T > 0.0)) fail("comparable_rate: T > 0 required");
    return -std::log(bond_price(p, p.r0, T)) / T;
}

double effective_vol(double sigma_z, double lambda, const JumpSpec& merton) {
    const auto* m = std::get_if<MertonJump>(&merton);
    if (!m) fail("effective_vol: defined for Merton jumps only");
    return std::sqrt(sigma_z * sigma_z + lambda * (m->nu * m->nu + m->varsigma * m->varsigma));
}

}  // namespace gmwb
