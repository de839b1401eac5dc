#ifndef CHEMFLOW_HOPF_COLE_HPP
#define CHEMFLOW_HOPF_COLE_HPP

#include <utility>

#include "chemflow/dynamics.hpp"
#include "chemflow/grid.hpp"

namespace chemflow {
namespace hopf_cole {

// (u, c) -> (p~, q):  p~ = u - p_infinity,  q = -grad(ln c).
// The output q is curl-free by construction.  Requires c > 0.
State forward(const KSState& ks);

// (p~, q) -> (u, c):  solves grad(phi) = q spectrally
// (phi_hat = -i k.q_hat / |k|^2 away from k = 0), fixes the free constant so
// that mean(ln c) = normalization with ln c = -phi, then c = exp(-phi),
// u = p~ + p_infinity.  q must be curl-free to the admissibility tolerance
// 1e-8 (relative to 1 + ||grad q||), and the reconstruction residual
// ||grad phi - q||_2 must not exceed 1e-8.
KSState inverse(const State& s, double normalization);

// Parameter/coordinate rescaling to the normalized system:
//   t~ = alpha t,  x~ = x sqrt(alpha/chi),  q~ = q sqrt(chi/alpha),
//   d~ = d/chi,  eps~ = eps/chi,  chi~ = alpha~ = 1,  p unchanged.
struct ScalingDescriptor {
    double time_factor = 1.0;  // alpha
    double space_factor = 1.0; // sqrt(alpha/chi)
    double q_factor = 1.0;     // sqrt(chi/alpha)
    double chi = 1.0;          // original parameters, for exact inversion
    double alpha = 1.0;
};

struct ScaledParams {
    ModelParams params;
    ScalingDescriptor scaling;
};

ScaledParams apply_scaling(const ModelParams& params);
ModelParams invert_scaling(const ScaledParams& sp);

// The scaled grid is the same lattice with relabeled extents (no
// interpolation: the whole box is rescaled, so grid points map to grid
// points for any factor).
Grid scaled_grid(const Grid& g, const ScalingDescriptor& scaling);

// Rescale a state onto the scaled grid (built by scaled_grid, owned by the
// caller): q values multiplied by q_factor, time by time_factor, params
// normalized.  invert_scaling_state undoes it exactly.
State apply_scaling_state(const State& s, const ScalingDescriptor& scaling,
                          const Grid& scaled);
State invert_scaling_state(const State& s, const ScalingDescriptor& scaling,
                           const Grid& original);

} // namespace hopf_cole
} // namespace chemflow

#endif
