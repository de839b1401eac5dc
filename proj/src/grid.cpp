#include "chemflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chemflow/errors.hpp"

namespace chemflow {

namespace {

bool power_of_two(int n) { return n >= 2 && (n & (n - 1)) == 0; }

constexpr double two_pi = 6.283185307179586476925286766559;

} // namespace

double Grid::min_spacing() const {
    double h = spacing(0);
    for (int a = 1; a < dim; ++a) h = std::min(h, spacing(a));
    return h;
}

double Grid::volume() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= length(a);
    return v;
}

int Grid::dealias_cutoff() const {
    int cut = size(0) / 3;
    for (int a = 1; a < dim; ++a) cut = std::min(cut, size(a) / 3);
    return cut;
}

bool Grid::compatible(const Grid& other) const {
    return dim == other.dim && n == other.n && extent == other.extent;
}

Grid make_grid(int dim, const std::vector<int>& sizes,
               const std::vector<double>& extents) {
    if (dim < 1 || dim > 3)
        throw config_error("grid dimension must be 1, 2 or 3, got " +
                           std::to_string(dim));
    if (int(sizes.size()) != dim)
        throw config_error("grid sizes must list one entry per axis");
    if (int(extents.size()) != dim)
        throw config_error("grid extents must list one entry per axis");

    Grid g;
    g.dim = dim;
    for (int a = 0; a < dim; ++a) {
        if (!power_of_two(sizes[a]))
            throw config_error("grid size along axis " + std::to_string(a) +
                               " must be a power of two >= 2, got " +
                               std::to_string(sizes[a]));
        if (!(extents[a] > 0.0) || !std::isfinite(extents[a]))
            throw config_error("grid extent along axis " + std::to_string(a) +
                               " must be positive and finite");
        g.n[a + 3 - dim] = sizes[a];
        g.extent[a + 3 - dim] = extents[a];
    }

    // Wavenumbers in FFT storage order: 0, 1, ..., n/2-1, -n/2, ..., -1,
    // scaled by 2*pi/L.  Singleton axes get the single entry 0.
    for (int ax = 0; ax < 3; ++ax) {
        const int n = g.n[ax];
        const double scale = two_pi / g.extent[ax];
        g.wavenumber[ax].resize(n);
        for (int m = 0; m < n; ++m) {
            const int m_signed = (m < (n + 1) / 2) ? m : m - n;
            g.wavenumber[ax][m] = scale * m_signed;
        }
    }

    // 2/3-rule mask over the r2c layout: drop any mode whose signed index
    // exceeds floor(n/3) in magnitude on some axis.
    g.dealias_keep.assign(g.spectral_size(), 1);
    const int nzc = g.nz_spec();
    std::array<int, 3> cut{};
    for (int ax = 0; ax < 3; ++ax) cut[ax] = g.n[ax] / 3;
    long s = 0;
    for (int i0 = 0; i0 < g.n[0]; ++i0) {
        const int m0 = (i0 < (g.n[0] + 1) / 2) ? i0 : i0 - g.n[0];
        for (int i1 = 0; i1 < g.n[1]; ++i1) {
            const int m1 = (i1 < (g.n[1] + 1) / 2) ? i1 : i1 - g.n[1];
            for (int i2 = 0; i2 < nzc; ++i2, ++s) {
                const bool keep = std::abs(m0) <= cut[0] &&
                                  std::abs(m1) <= cut[1] && i2 <= cut[2];
                g.dealias_keep[s] = keep ? 1 : 0;
            }
        }
    }
    return g;
}

} // namespace chemflow
