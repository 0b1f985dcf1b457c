#pragma once

#include <complex>
#include <variant>

namespace gmwb {

// Log-jump-size distributions of the multiplier Y (densities of ln Y).
struct MertonJump {
    double nu;        // mean of ln Y
    double varsigma;  // std of ln Y, > 0
};
struct KouJump {
    double p_up;  // probability of an upward jump, in [0,1]
    double eta1;  // up-jump rate, > 1 (finite E[Y])
    double eta2;  // down-jump rate, > 0
};
struct NoJump {};

using JumpSpec = std::variant<NoJump, MertonJump, KouJump>;

// Market model: correlated jump-diffusion sub-account + Vasicek short rate.
struct ModelParams {
    double sigma_z = 0.3;     // sub-account volatility, 1/sqrt(yr)
    double lambda  = 0.1;     // jump intensity, 1/yr
    JumpSpec jump  = MertonJump{-0.9, 0.45};
    double rho     = 0.2;     // corr(d ln Z, dR), |rho| < 1
    double delta   = 0.0349;  // mean-reversion speed, 1/yr
    double theta   = 0.05;    // long-run rate
    double sigma_r = 0.02;    // rate volatility, 1/sqrt(yr)
    double beta    = 0.02;    // proportional insurance fee, 1/yr
    double r0      = 0.05;    // spot short rate at valuation

    void validate() const;  // throws std::invalid_argument naming the violated bound
};

// GMWB contract terms. withdraw_rate is in currency per year.
struct Contract {
    double maturity      = 5.0;    // T, years
    double withdraw_rate = 20.0;   // C_r, currency/yr
    double penalty       = 0.10;   // mu, in (0,1)
    double fixed_cost    = 1e-8;   // c > 0, uniqueness device
    double premium       = 100.0;  // z0, initial sub-account == guarantee balance

    void validate() const;
};

bool jump_is_none(const JumpSpec& spec);
void validate_jump(const JumpSpec& spec);

// Density b(y) of ln Y.
double jump_density(const JumpSpec& spec, double y);

// B(eta) = integral of b(y) exp(-2 pi i eta y) dy.  |B| <= 1, B(0) = 1.
std::complex<double> jump_char(const JumpSpec& spec, double eta);

// kappa = E[Y - 1].
double jump_kappa(const JumpSpec& spec);

// Vasicek zero-coupon bond price p_b(r, tau; tau-to-maturity).
double bond_price(const ModelParams& p, double r, double tau);

// Yield-to-maturity r_c solving exp(-r_c T) = p_b(r0, T).
double comparable_rate(const ModelParams& p, double T);

// Enhanced constant volatility sigma_c = sqrt(sigma_z^2 + lambda (nu^2 + varsigma^2)).
// Defined for Merton jumps only.
double effective_vol(double sigma_z, double lambda, const JumpSpec& merton);

}  // namespace gmwb
