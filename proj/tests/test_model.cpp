#include <doctest.h>

#include <cmath>
#include <random>

#include "gmwb/model.hpp"
#include "oracles.hpp"

using namespace gmwb;

namespace {
const MertonJump kMerton{-0.9, 0.45};
const KouJump kKou{0.3445, 3.0465, 3.0775};

ModelParams table4() {
    ModelParams p;  // defaults carry the Merton + Vasicek baseline
    return p;
}
}  // namespace

TEST_CASE("jump_density point values and normalization") {
    CHECK(jump_density(MertonJump{0.0, 1.0}, 0.0) == doctest::Approx(0.3989422804).epsilon(1e-9));
    CHECK(jump_density(kKou, 1e-14) == doctest::Approx(0.3445 * 3.0465).epsilon(1e-9));

    for (const JumpSpec spec : {JumpSpec(kMerton), JumpSpec(kKou)}) {
        const double mass =
            oracle::integrate([&](double y) { return jump_density(spec, y); }, -20.0, 20.0, 1e-13);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("jump_char matches the Fourier integral of the density") {
    CHECK(jump_char(kMerton, 0.0) == std::complex<double>(1.0, 0.0));
    CHECK(jump_char(kKou, 0.0) == std::complex<double>(1.0, 0.0));
    CHECK(jump_char(NoJump{}, 3.7) == std::complex<double>(1.0, 0.0));

    auto quad = [](const JumpSpec& spec, double eta) {
        return oracle::integrate_c(
            [&](double y) {
                const double ph = -2.0 * M_PI * eta * y;
                return jump_density(spec, y) * std::complex<double>(std::cos(ph), std::sin(ph));
            },
            -25.0, 25.0, 1e-12);
    };
    CHECK(std::abs(jump_char(kMerton, 0.5) - quad(kMerton, 0.5)) < 1e-8);
    CHECK(std::abs(jump_char(kKou, 1.0) - quad(kKou, 1.0)) < 1e-8);

    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> eta(-50.0, 50.0);
    for (int i = 0; i < 1000; ++i) {
        const double e = eta(gen);
        CHECK(std::abs(jump_char(kMerton, e)) <= 1.0 + 1e-12);
        CHECK(std::abs(jump_char(kKou, e)) <= 1.0 + 1e-12);
    }
}

TEST_CASE("jump_kappa closed forms against quadrature") {
    CHECK(jump_kappa(kMerton) == doctest::Approx(-0.5501).epsilon(1e-4));
    CHECK(jump_kappa(NoJump{}) == 0.0);

    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const MertonJump m{-1.0 + 2.0 * u(gen), 0.1 + 0.6 * u(gen)};
        const double q = oracle::integrate(
            [&](double y) { return (std::exp(y) - 1.0) * jump_density(m, y); }, -30.0, 10.0, 1e-13);
        CHECK(jump_kappa(m) == doctest::Approx(q).epsilon(1e-8));

        const KouJump k{u(gen), 1.5 + 3.0 * u(gen), 0.5 + 3.0 * u(gen)};
        const double qk = oracle::integrate(
            [&](double y) { return (std::exp(y) - 1.0) * jump_density(k, y); }, -60.0, 60.0, 1e-13);
        CHECK(jump_kappa(k) == doctest::Approx(qk).epsilon(1e-8));
    }
    CHECK_THROWS(jump_kappa(KouJump{0.5, 0.9, 3.0}));
}

TEST_CASE("bond_price identities and Table-4 yields") {
    ModelParams p = table4();
    CHECK(bond_price(p, 0.05, 0.0) == doctest::Approx(1.0));
    CHECK(bond_price(p, -0.1, 0.0) == doctest::Approx(1.0));

    // sigma_r = 0, theta = r: deterministic flat rate
    ModelParams flat = p;
    flat.sigma_r = 0.0;
    flat.theta = 0.03;
    CHECK(bond_price(flat, 0.03, 7.0) == doctest::Approx(std::exp(-0.03 * 7.0)).epsilon(1e-12));

    CHECK(comparable_rate(p, 5.0) == doctest::Approx(0.0485).epsilon(1.1e-2));
    CHECK(comparable_rate(p, 10.0) == doctest::Approx(0.0448).epsilon(1.1e-2));
    CHECK(std::fabs(comparable_rate(p, 5.0) - 0.0485) < 5e-4);
    CHECK(std::fabs(comparable_rate(p, 10.0) - 0.0448) < 5e-4);
    CHECK(bond_price(p, 0.05, 10.0) ==
          doctest::Approx(std::exp(-0.0448 * 10.0)).epsilon(1e-3));

    ModelParams triv = p;
    triv.sigma_r = 0.0;
    triv.theta = 0.05;
    triv.r0 = 0.05;
    CHECK(comparable_rate(triv, 5.0) == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("bond_price consistent with exact Vasicek path simulation") {
    // Affine recombination against Monte Carlo of exact transitions.
    ModelParams p = table4();
    const double T = 4.0;
    const int steps = 8;
    const double dt = T / steps;
    std::mt19937_64 gen(99);
    std::normal_distribution<double> nd;
    const int n = 100000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double r = p.r0, I = 0.0;
        for (int s = 0; s < steps; ++s) {
            // trapezoidal accumulation of the integral with the exact endpoint draw
            const double e = std::exp(-p.delta * dt);
            const double var =
                p.sigma_r * p.sigma_r * (1.0 - e * e) / (2.0 * p.delta);
            const double rn = p.theta + (r - p.theta) * e + std::sqrt(var) * nd(gen);
            I += 0.5 * (r + rn) * dt;
            r = rn;
        }
        const double x = std::exp(-I);
        sum += x;
        sum2 += x * x;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    const double exact = bond_price(p, p.r0, T);
    // discretization bias of the trapezoidal integral is O(dt^2), well below 3 se
    CHECK(std::fabs(mean - exact) < 3.0 * se + 1e-4);
}

TEST_CASE("effective_vol") {
    CHECK(effective_vol(0.3, 0.1, kMerton) == doctest::Approx(0.4373).epsilon(1e-3));
    CHECK(effective_vol(0.25, 0.0, kMerton) == doctest::Approx(0.25));
    CHECK(effective_vol(0.0, 1.0, MertonJump{1.0, 1e-30}) == doctest::Approx(1.0));
    CHECK_THROWS(effective_vol(0.3, 0.1, JumpSpec(kKou)));
    CHECK_THROWS(effective_vol(0.3, 0.1, JumpSpec(NoJump{})));
}

TEST_CASE("parameter validation") {
    ModelParams p = table4();
    CHECK_NOTHROW(p.validate());
    p.rho = 1.0;
    CHECK_THROWS(p.validate());
    p = table4();
    p.sigma_z = 0.0;
    CHECK_THROWS(p.validate());
    p = table4();
    p.jump = KouJump{0.5, 0.9, 1.0};
    CHECK_THROWS(p.validate());

    Contract c;
    CHECK_NOTHROW(c.validate());
    c.penalty = 1.0;
    CHECK_THROWS(c.validate());
    c = Contract{};
    c.fixed_cost = 0.0;
    CHECK_THROWS(c.validate());
}
