#ifndef CHEMFLOW_GRID_HPP
#define CHEMFLOW_GRID_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

namespace chemflow {

// Uniform periodic grid in 1, 2 or 3 dimensions.
//
// Fields are stored row-major over the user axes (last axis fastest).
// Internally the shape is padded with leading singleton axes to rank 3 so
// loops and FFT layouts are uniform; user axis a corresponds to internal
// axis a + (3 - dim).  The real-to-complex transform acts on the last axis,
// whose spectral extent is n/2 + 1.
struct Grid {
    int dim = 0;
    std::array<int, 3> n{1, 1, 1};           // padded sizes, trailing dims active
    std::array<double, 3> extent{1.0, 1.0, 1.0};
    std::array<std::vector<double>, 3> wavenumber; // per internal axis, FFT storage order
    std::vector<std::uint8_t> dealias_keep;  // spectral layout, 1 = keep

    int size(int user_axis) const { return n[user_axis + 3 - dim]; }
    double length(int user_axis) const { return extent[user_axis + 3 - dim]; }
    double spacing(int user_axis) const {
        return length(user_axis) / size(user_axis);
    }
    double min_spacing() const;
    double volume() const;

    long points() const { return long(n[0]) * n[1] * n[2]; }
    int nz_spec() const { return n[2] / 2 + 1; }
    long spectral_size() const { return long(n[0]) * n[1] * nz_spec(); }

    // Largest mode index kept by the 2/3 dealias rule, over all axes.
    int dealias_cutoff() const;

    bool compatible(const Grid& other) const;
};

// sizes must be powers of two (>= 2 per axis), extents positive.
Grid make_grid(int dim, const std::vector<int>& sizes,
               const std::vector<double>& extents);

struct ScalarField {
    const Grid* grid = nullptr;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const Grid& g) : grid(&g), v(g.points(), 0.0) {}
    double& operator[](long i) { return v[i]; }
    double operator[](long i) const { return v[i]; }
};

struct VectorField {
    const Grid* grid = nullptr;
    std::vector<ScalarField> comp; // dim components

    VectorField() = default;
    explicit VectorField(const Grid& g) : grid(&g), comp(g.dim, ScalarField(g)) {}
};

struct SpectralScalar {
    const Grid* grid = nullptr;
    std::vector<std::complex<double>> c;

    SpectralScalar() = default;
    explicit SpectralScalar(const Grid& g) : grid(&g), c(g.spectral_size()) {}
};

struct SpectralVector {
    const Grid* grid = nullptr;
    std::vector<SpectralScalar> comp;

    SpectralVector() = default;
    explicit SpectralVector(const Grid& g) : grid(&g), comp(g.dim, SpectralScalar(g)) {}
};

} // namespace chemflow

#endif
