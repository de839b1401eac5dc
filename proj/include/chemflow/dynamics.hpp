#ifndef CHEMFLOW_DYNAMICS_HPP
#define CHEMFLOW_DYNAMICS_HPP

#include <complex>
#include <string>
#include <utility>

#include "chemflow/grid.hpp"

namespace chemflow {

enum class ModelTag { diffusive, nondiffusive, keller_segel };

const char* model_name(ModelTag tag);
ModelTag model_from_name(const std::string& name); // "diffusive"|"nondiffusive"|"ks"

struct ModelParams {
    double d = 1.0;          // cell diffusivity
    double epsilon = 0.0;    // chemical diffusivity
    double p_infinity = 1.0; // far-field state
    double chi = 1.0;        // chemotactic sensitivity
    double alpha = 1.0;      // consumption rate

    void validate(ModelTag tag) const; // throws config_error
};

// Perturbation state of the conservation-law system:
//   p_tilde_t = d*lap(p_tilde) + div(q) + div(p_tilde q)
//   q_t       = grad(p_tilde) - eps*grad(|q|^2) + eps*lap(q)
// (nondiffusive tag: epsilon = 0, the q equation is exactly q_t = grad(p_tilde)).
struct State {
    double time = 0.0;
    ScalarField p_tilde;
    VectorField q;
    ModelParams params;
    ModelTag model = ModelTag::diffusive;
};

// Keller-Segel state:
//   u_t = div(d*grad(u) - chi*u*grad(ln c)),  c_t = eps*lap(c) - alpha*u*c
struct KSState {
    double time = 0.0;
    ScalarField u;
    ScalarField c; // strictly positive
    ModelParams params;
};

// Nonlinear terms of the conservation system, dealiased:
//   dp_tilde = div(p_tilde q),  dq = -eps*grad(|q|^2).
// The linear part is handled exactly by the propagators (see integrator).
std::pair<ScalarField, VectorField> nonlinear_rhs_conservation(const State& s);

// Per-mode linear operator on (p_hat, longitudinal q amplitude k_hat.q_hat):
//   [[-d|k|^2, i|k|], [i|k|, -eps|k|^2]]
// plus the transverse scalar rate -eps|k|^2.  Zero operator at k = 0.
struct LinearBlock {
    std::complex<double> m00, m01, m10, m11;
    double transverse_rate = 0.0;
};
LinearBlock linear_block(const std::array<double, 3>& k, const ModelParams& params);

// Full Keller-Segel right-hand side, products dealiased.
std::pair<ScalarField, ScalarField> ks_rhs(const KSState& s,
                                           double c_floor = 1e-8);

namespace detail {

// Spectral-space core used by the integrator: inputs are dealiased
// coefficients, outputs are the dealiased nonlinear terms.
void conservation_nonlinear_spectral(const Grid& g, const ModelParams& params,
                                     const SpectralScalar& p,
                                     const SpectralVector& q,
                                     SpectralScalar& dp, SpectralVector& dq);

void ks_nonlinear_spectral(const Grid& g, const ModelParams& params,
                           const SpectralScalar& u, const SpectralScalar& c,
                           double time, double c_floor,
                           SpectralScalar& du, SpectralScalar& dc);

} // namespace detail

} // namespace chemflow

#endif
