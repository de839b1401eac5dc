#ifndef CHEMFLOW_SPECTRAL_HPP
#define CHEMFLOW_SPECTRAL_HPP

#include "chemflow/grid.hpp"

namespace chemflow {

// Discrete Fourier transforms on a Grid via FFTW (r2c / c2r).
//
// Normalization: forward() is the unnormalized DFT,
//     F(m) = sum_j f(x_j) exp(-i k_m . x_j),
// and inverse() divides by the total point count, so inverse(forward(f)) == f
// up to roundoff.  "Amplitude" coefficients c(m) = F(m)/N satisfy the
// discrete Parseval identity  mean(f^2) = sum_m w_m |c(m)|^2  with Hermitian
// weight w_m (2 for modes stored once in the half-complex layout, 1 for the
// self-conjugate planes on the last axis).
SpectralScalar forward(const ScalarField& f);
ScalarField inverse(const SpectralScalar& F);

SpectralVector forward(const VectorField& f);
VectorField inverse(const SpectralVector& F);

// Hermitian weight for the stored mode with last-axis index i2 on grid g:
// 1 if the mode's conjugate lives in the same stored plane, else 2.
inline double hermitian_weight(const Grid& g, int i2) {
    return (i2 == 0 || 2 * i2 == g.n[2]) ? 1.0 : 2.0;
}

// Spectral differential operators.  All act mode-by-mode with the grid's
// wavenumber tables; none dealias implicitly.
SpectralVector gradient(const SpectralScalar& F);
SpectralScalar divergence(const SpectralVector& F);
SpectralScalar laplacian(const SpectralScalar& F);
SpectralVector laplacian(const SpectralVector& F);

// Curl: in 1d the result has zero components (returned as an empty-dim
// convention is useless, so we return a zero "vector" with one component);
// in 2d it is the scalar dq1/dx0 - dq0/dx1 stored as a single component;
// in 3d the usual three components.
SpectralVector curl(const SpectralVector& F);
int curl_components(int dim);

void dealias_in_place(SpectralScalar& F);
void dealias_in_place(SpectralVector& F);
SpectralScalar dealias(const SpectralScalar& F);
SpectralVector dealias(const SpectralVector& F);

// Largest relative deviation from conjugate symmetry in the stored
// self-conjugate planes of the last axis.  Zero for transforms of real data.
double hermitian_defect(const SpectralScalar& F);

// Overwrite the redundant entries of the self-conjugate planes so the
// coefficients describe a real field exactly.
void enforce_hermitian(SpectralScalar& F);

} // namespace chemflow

#endif
