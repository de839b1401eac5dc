#ifndef CHEMFLOW_DIAGNOSTICS_HPP
#define CHEMFLOW_DIAGNOSTICS_HPP

#include <utility>
#include <vector>

#include "chemflow/dynamics.hpp"
#include "chemflow/grid.hpp"

namespace chemflow {

// Norms carry the physical volume element: ||f||_2^2 = Vol * mean(f^2),
// evaluated spectrally through Parseval.  H^k uses the multiplier
// sum_{j<=k} |k|^{2j}; L-infinity is the max pointwise magnitude
// (Euclidean magnitude for vector fields).
double norm_l2(const ScalarField& f);
double norm_l2(const VectorField& f);
double norm_hk(const ScalarField& f, int k);
double norm_hk(const VectorField& f, int k);
double norm_linf(const ScalarField& f);
double norm_linf(const VectorField& f);
double mass(const ScalarField& f); // integral of f over the box

// Spectral-side versions (same values, no transform).
double spectral_l2(const SpectralScalar& F);
double spectral_l2(const SpectralVector& F);
double spectral_hk(const SpectralScalar& F, int k);
double spectral_hk(const SpectralVector& F, int k);

// Time series of the monitored quantities of one run.  The *_acc and
// ledger_residual columns are filled by energy_ledger.
struct DiagnosticsRecord {
    ModelParams params;
    ModelTag model = ModelTag::diffusive;

    std::vector<double> t;
    std::vector<double> l2_p, l2_q;
    std::vector<double> h1_p, h1_q, h2_p, h2_q, h3_p, h3_q;
    std::vector<double> linf_p, linf_q;
    std::vector<double> l2_gradp, l2_divq, l2_gradq, l2_curlq;
    std::vector<double> mass_p;
    std::vector<double> work_p; // instantaneous  int p~ (q . grad p~) dx
    std::vector<double> work_q; // instantaneous  int q_i q_j d_j q_i dx
    std::vector<double> diss_p_acc;      // 2 d   int_0^t ||grad p~||^2
    std::vector<double> diss_q_acc;      // 2 eps int_0^t ||grad q||^2
    std::vector<double> ledger_residual; // balance defect, see energy_ledger

    std::size_t size() const { return t.size(); }
};

// Append one sample computed from spectral coefficients (the integrator's
// native representation).  Physical-space quantities are obtained by
// inverse transforms internally.
void append_sample(DiagnosticsRecord& rec, const Grid& g, double t,
                   const SpectralScalar& ph, const SpectralVector& qh);
void append_sample(DiagnosticsRecord& rec, const State& s);

// Exact cumulative integral of the interpolating parabolas through uniform
// samples (composite Simpson, with 3-point half-interval rules for the odd
// prefixes).  Returns I[i] = integral from t[0] to t[i].
std::vector<double> cumulative_simpson(const std::vector<double>& y, double h);

// Evaluate the discrete energy balance on a sampled trajectory:
//   ||p~||^2 + ||q||^2 + 2d int ||grad p~||^2 + 2eps int ||grad q||^2
//     = ||p~0||^2 + ||q0||^2 - 2 int int p~ q.grad p~ - 4eps int int q^T(grad q . q)
// Fills diss_p_acc, diss_q_acc, ledger_residual in place and returns the
// residual series (left minus right side).  Needs >= 3 uniform samples.
std::vector<double> energy_ledger(DiagnosticsRecord& rec,
                                  const ModelParams& params);

// int p~ (q . grad p~) dx evaluated directly and as -1/2 int p~^2 div q dx.
std::pair<double, double> nonlinear_ledger_crosscheck(const State& s);

// (||curl q||_2, integral of p~)
std::pair<double, double> curl_mass_monitor(const State& s);

// (||grad q||_2, ||div q||_2); equal to 1e-12 relative for curl-free q.
std::pair<double, double> divcurl_identity_check(const VectorField& q);

} // namespace chemflow

#endif
