#pragma once

#include <cstddef>
#include <vector>

#include "gmwb/grid.hpp"

namespace gmwb {

// One time level of the discrete solution on the padded lattice.
// Storage order is [j][iw][ik] with the rate index innermost.
struct ValueField {
    const Grid* grid = nullptr;
    int time_index = 0;
    std::vector<double> v;

    ValueField() = default;
    explicit ValueField(const Grid& g, int m = 0) : grid(&g), time_index(m), v(g.field_size()) {}

    std::size_t idx(int j, int iw, int ik) const {
        return (std::size_t(j) * grid->Nd + iw) * grid->Kd + ik;
    }
    double& at(int j, int iw, int ik) { return v[idx(j, iw, ik)]; }
    double at(int j, int iw, int ik) const { return v[idx(j, iw, ik)]; }
    double* slice(int j) { return v.data() + std::size_t(j) * grid->slice_size(); }
    const double* slice(int j) const { return v.data() + std::size_t(j) * grid->slice_size(); }
};

// Trilinear interpolation over the enclosing cell; degenerates to bi-/uni-linear
// on node-aligned queries and is exact on lattice nodes.  Queries are clamped to
// the stored lattice hull [wd_min, w(Nd-1)] x [rd_min, r(Kd-1)] x [0, z0].
// Throws std::invalid_argument on non-finite coordinates.
double interp3(const ValueField& f, double w, double r, double a);

}  // namespace gmwb
