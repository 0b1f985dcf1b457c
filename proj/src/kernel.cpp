#include "gmwb/kernel.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <sstream>

namespace gmwb {

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;
constexpr double sigma_r_floor = 1e-4;

double sinc2(double x) {  // sin^2(pi x) / (pi x)^2 with the x -> 0 limit
    if (x == 0.0) return 1.0;
    const double s = std::sin(M_PI * x) / (M_PI * x);
    return s * s;
}

struct FftwBuf {
    fftw_complex* p = nullptr;
    explicit FftwBuf(std::size_t n) : p(fftw_alloc_complex(n)) {
        if (!p) throw std::bad_alloc();
    }
    ~FftwBuf() { fftw_free(p); }
    FftwBuf(const FftwBuf&) = delete;
    FftwBuf& operator=(const FftwBuf&) = delete;
};

}  // namespace

std::complex<double> psi(const ModelParams& p, double eta, double xi) {
    const double sr = std::max(p.sigma_r, sigma_r_floor);
    const double u = two_pi * eta, x = two_pi * xi;
    const double kappa = jump_kappa(p.jump);
    std::complex<double> out(-0.5 * p.sigma_z * p.sigma_z * u * u - p.rho * p.sigma_z * sr * u * x -
                                 0.5 * sr * sr * x * x,
                             -p.lambda * kappa * u);
    if (p.lambda > 0.0) out += p.lambda * (std::conj(jump_char(p.jump, eta)) - 1.0);
    return out;
}

std::vector<double> weights_physical(const Grid& g, const ModelParams& p, double dtau, int alpha) {
    if (alpha < 1 || (alpha & (alpha - 1)) != 0)
        throw std::invalid_argument("weights_physical: alpha must be a power of two");
    const std::size_t SN = std::size_t(alpha) * g.Nd;
    const std::size_t SK = std::size_t(alpha) * g.Kd;
    if (SN * SK > (std::size_t(1) << 31))
        throw std::invalid_argument("weights_physical: FFT size exceeds the 2^31 guard");

    const double Pd = g.wd_max - g.wd_min;
    const double Qd = g.rd_max - g.rd_min;

    // Per-s and per-z pieces of Psi dtau; the exponents are summed before the
    // single exp below so the cross term cannot overflow against an
    // underflowing diffusion factor.
    const double sr = std::max(p.sigma_r, sigma_r_floor);
    const double kappa = jump_kappa(p.jump);
    std::vector<double> re_s(SN), cis_c(SN), cis_s(SN), tgw(SN);
    for (std::size_t is = 0; is < SN; ++is) {
        const double s = (is < SN / 2) ? double(is) : double(is) - double(SN);
        const double eta = s / Pd;
        const double u = two_pi * eta;
        std::complex<double> e(-0.5 * p.sigma_z * p.sigma_z * u * u, -p.lambda * kappa * u);
        if (p.lambda > 0.0) e += p.lambda * (std::conj(jump_char(p.jump, eta)) - 1.0);
        re_s[is] = e.real() * dtau;
        cis_c[is] = std::cos(e.imag() * dtau);
        cis_s[is] = std::sin(e.imag() * dtau);
        tgw[is] = sinc2(s / g.Nd);
    }
    std::vector<double> re_z(SK), tgr(SK), xs(SK);
    for (std::size_t iz = 0; iz < SK; ++iz) {
        const double z = (iz < SK / 2) ? double(iz) : double(iz) - double(SK);
        const double x = two_pi * z / Qd;
        re_z[iz] = -0.5 * sr * sr * x * x * dtau;
        tgr[iz] = sinc2(z / g.Kd);
        xs[iz] = x;
    }
    // The +-SN/2 (resp. +-SK/2) terms have no conjugate partners inside the
    // truncation box; drop them so the weights stay real.  For even alpha the
    // trig factor vanishes there anyway.
    tgw[SN / 2] = 0.0;
    tgr[SK / 2] = 0.0;

    FftwBuf buf(SN * SK);
    fftw_plan plan = fftw_plan_dft_2d(int(SN), int(SK), buf.p, buf.p, FFTW_BACKWARD, FFTW_ESTIMATE);
    for (std::size_t is = 0; is < SN; ++is) {
        const double s = (is < SN / 2) ? double(is) : double(is) - double(SN);
        const double m = -p.rho * p.sigma_z * sr * (two_pi * s / Pd) * dtau;
        const double tw = tgw[is];
        fftw_complex* row = buf.p + is * SK;
        for (std::size_t iz = 0; iz < SK; ++iz) {
            const double mag = tw * tgr[iz] * std::exp(re_s[is] + re_z[iz] + m * xs[iz]);
            row[iz][0] = mag * cis_c[is];
            row[iz][1] = mag * cis_s[is];
        }
    }
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    const double scale = 1.0 / (Pd * Qd);
    std::vector<double> out(std::size_t(g.Nd) * g.Kd);
    double max_re = 0.0, max_im = 0.0;
    for (int ip = 0; ip < g.Nd; ++ip) {
        const fftw_complex* row = buf.p + std::size_t(alpha) * ip * SK;
        for (int iq = 0; iq < g.Kd; ++iq) {
            const fftw_complex& c = row[std::size_t(alpha) * iq];
            out[std::size_t(ip) * g.Kd + iq] = c[0] * scale;
            max_re = std::max(max_re, std::fabs(c[0]));
            max_im = std::max(max_im, std::fabs(c[1]));
        }
    }
    if (max_im > 1e-10 * std::max(1.0, max_re)) {
        std::ostringstream os;
        os << "weights_physical: imaginary residue " << max_im * scale << " exceeds tolerance";
        throw std::runtime_error(os.str());
    }
    return out;
}

double monotonicity_defect(const Grid& g, const std::vector<double>& g_phys) {
    double neg = 0.0;
    for (double x : g_phys)
        if (x < 0.0) neg -= x;
    return g.dw * g.dr * neg;
}

KernelWeights select_weights(const Grid& g, const ModelParams& p, double dtau, double eps,
                             double eps1, int alpha_cap) {
    if (!(eps > 0.0) || !(eps1 > 0.0))
        throw std::invalid_argument("select_weights: eps, eps1 > 0 required");
    p.validate();

    std::vector<double> prev = weights_physical(g, p, dtau, 1);
    double test1 = 0.0, test2 = 0.0;
    int alpha = 0;
    std::vector<double> cur;
    for (int a = 2; a <= alpha_cap; a *= 2) {
        cur = weights_physical(g, p, dtau, a);
        test1 = 0.0;
        test2 = 0.0;
        for (std::size_t i = 0; i < cur.size(); ++i) {
            test1 += std::min(cur[i], 0.0);
            test2 += std::fabs(cur[i] - prev[i]);
        }
        test1 *= g.dw * g.dr;
        test2 *= g.dw * g.dr;
        if (std::fabs(test1) < eps * dtau / g.T && test2 < eps1) {
            alpha = a;
            break;
        }
        prev.swap(cur);
    }
    if (alpha == 0) {
        std::ostringstream os;
        os << "select_weights: no alpha <= " << alpha_cap << " satisfies both tests"
           << " (|test1| = " << std::fabs(test1) << " vs " << eps * dtau / g.T
           << ", test2 = " << test2 << " vs " << eps1 << ")";
        throw kernel_convergence_error(os.str());
    }

    KernelWeights kw;
    kw.Nd = g.Nd;
    kw.Kd = g.Kd;
    kw.alpha_eps = alpha;
    kw.monotonicity_defect = std::fabs(test1);
    kw.accuracy_residual = test2;
    kw.g_phys = std::move(cur);

    double sum = 0.0;
    for (double x : kw.g_phys) sum += x;
    kw.weight_sum_error = std::fabs(g.dw * g.dr * sum - 1.0);

    // Fourier-domain weights: dw dr times the forward DFT of g~.
    FftwBuf buf(std::size_t(g.Nd) * g.Kd);
    for (std::size_t i = 0; i < kw.g_phys.size(); ++i) {
        buf.p[i][0] = kw.g_phys[i];
        buf.p[i][1] = 0.0;
    }
    fftw_plan plan = fftw_plan_dft_2d(g.Nd, g.Kd, buf.p, buf.p, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    kw.G_full.resize(std::size_t(g.Nd) * g.Kd);
    const double scale = g.dw * g.dr;
    for (std::size_t i = 0; i < kw.G_full.size(); ++i)
        kw.G_full[i] = std::complex<double>(buf.p[i][0], buf.p[i][1]) * scale;

    const int Kh = g.Kd / 2 + 1;
    kw.G_half.resize(std::size_t(g.Nd) * Kh);
    for (int s = 0; s < g.Nd; ++s)
        for (int z = 0; z < Kh; ++z)
            kw.G_half[std::size_t(s) * Kh + z] = kw.G_full[std::size_t(s) * g.Kd + z];
    return kw;
}

}  // namespace gmwb
