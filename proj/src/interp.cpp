#include "gmwb/interp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gmwb {

double interp3(const ValueField& f, double w, double r, double a) {
    if (!std::isfinite(w) || !std::isfinite(r) || !std::isfinite(a))
        throw std::invalid_argument("interp3: non-finite query coordinate");
    const Grid& g = *f.grid;

    double tw = (w - g.wd_min) / g.dw;
    tw = std::clamp(tw, 0.0, double(g.Nd - 1));
    int iw = std::min(int(tw), g.Nd - 2);
    const double fw = tw - iw;

    double tr = (r - g.rd_min) / g.dr;
    tr = std::clamp(tr, 0.0, double(g.Kd - 1));
    int ik = std::min(int(tr), g.Kd - 2);
    const double fr = tr - ik;

    double fa;
    const int q = g.a_cell(a, &fa);

    const double* lo = f.slice(q);
    const double* hi = f.slice(q + 1);
    const std::size_t i00 = std::size_t(iw) * g.Kd + ik;
    const std::size_t i10 = i00 + g.Kd;  // iw+1

    auto bilin = [&](const double* s) {
        const double v00 = s[i00], v01 = s[i00 + 1];
        const double v10 = s[i10], v11 = s[i10 + 1];
        return (1.0 - fw) * ((1.0 - fr) * v00 + fr * v01) + fw * ((1.0 - fr) * v10 + fr * v11);
    };
    return (1.0 - fa) * bilin(lo) + fa * bilin(hi);
}

}  // namespace gmwb
