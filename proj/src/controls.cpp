#include "gmwb/controls.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gmwb {

double interp_control(const ControlField& c, double w, double r, double a) {
    if (!std::isfinite(w) || !std::isfinite(r) || !std::isfinite(a))
        throw std::invalid_argument("interp_control: non-finite query coordinate");
    const Grid& g = *c.grid;

    double tw = (w - g.wd_min) / g.dw;
    tw = std::clamp(tw, 0.0, double(c.nw - 1));
    const int iw = std::min(int(tw), c.nw - 2);
    const double fw = tw - iw;

    double tr = (r - g.r_of(g.ik_lo())) / g.dr;
    tr = std::clamp(tr, 0.0, double(c.nk - 1));
    const int ikc = std::min(int(tr), c.nk - 2);
    const double fr = tr - ikc;

    double fa;
    const int q = g.a_cell(a, &fa);

    auto bil = [&](int j) {
        const std::size_t i00 = c.idx(j, iw, ikc);
        const std::size_t i10 = c.idx(j, iw + 1, ikc);
        const double v0 = (1.0 - fr) * c.gamma[i00] + fr * c.gamma[i00 + 1];
        const double v1 = (1.0 - fr) * c.gamma[i10] + fr * c.gamma[i10 + 1];
        return (1.0 - fw) * v0 + fw * v1;
    };
    return (1.0 - fa) * bil(q) + fa * bil(q + 1);
}

}  // namespace gmwb
