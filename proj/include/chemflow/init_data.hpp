#ifndef CHEMFLOW_INIT_DATA_HPP
#define CHEMFLOW_INIT_DATA_HPP

#include <cstdint>

#include "chemflow/dynamics.hpp"
#include "chemflow/grid.hpp"

namespace chemflow {

// Counter-based generator pinned for cross-platform reproducibility (see
// README for the exact algorithm): two splitmix64 finalizer passes over
// (seed, counter).
std::uint64_t mix64(std::uint64_t z);
double rng_uniform(std::uint64_t seed, std::uint64_t counter); // in [0, 1)

struct InitSpec {
    std::uint64_t seed = 0;
    double amplitude = 0.0;
    int band_limit = 1;
};

// Deterministic pseudo-random initial data:
//   p~0 = a * (band-limited Gaussian field, zero mean, unit L2 norm)
//   q0  = a * grad(phi0) / ||grad(phi0)||_2   (curl-free by construction)
// so ||p~0||^2 + ||q0||^2 = 2 a^2.  band_limit must be >= 1 and within the
// dealias cutoff.
State gen_init(const Grid& g, const InitSpec& spec, const ModelParams& params,
               ModelTag model);

} // namespace chemflow

#endif
