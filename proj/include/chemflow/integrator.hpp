#ifndef CHEMFLOW_INTEGRATOR_HPP
#define CHEMFLOW_INTEGRATOR_HPP

#include <functional>
#include <utility>
#include <vector>

#include "chemflow/diagnostics.hpp"
#include "chemflow/dynamics.hpp"
#include "chemflow/grid.hpp"

namespace chemflow {

struct StepSchedule {
    double dt = 0.0;
    double t_end = 0.0;
    int stride = 1;         // diagnostics every this many steps
    double cfl_safety = 1.0;

    void validate() const;
    // Number of steps; t_end must be an integer multiple of dt (1e-8
    // relative) and the step count a multiple of stride.
    long n_steps() const;
};

// Exact per-mode solution operators of the linear part, for step sizes dt
// and dt/2.  For each stored mode: the 2x2 exponential acting on
// (p_hat, longitudinal amplitude) and the scalar transverse factor
// exp(-eps|k|^2 dt).  Identity at k = 0.
struct PropagatorTable {
    struct ModeOp {
        std::complex<double> m00, m01, m10, m11;
        double s = 1.0;
    };
    const Grid* grid = nullptr;
    ModelParams params;
    double dt = 0.0;
    std::vector<ModeOp> full, half;
    std::vector<std::array<double, 3>> unit_k; // zero vector at k = 0
};

PropagatorTable build_propagators(const Grid& g, const ModelParams& params,
                                  double dt);

// Single 2x2 exponential for one wavenumber (the building block of the
// table; exposed for oracle tests).
PropagatorTable::ModeOp mode_exponential(const std::array<double, 3>& k,
                                         const ModelParams& params, double dt);

// One IFRK4 step of the conservation system.  The table must have been
// built for this grid, params and dt.
State step(const State& s, const PropagatorTable& propagators, double dt);

struct SimulateOptions {
    bool linearized = false; // drop the nonlinear terms (testing aid)
    double c_floor = 1e-8;
    double blowup_linf = 1e6;
    std::vector<std::function<void(const State&)>> observers;
    // Lower-cost hook handed the raw coefficients at each sample time
    // (no inverse transforms); used by the sweep driver.
    std::function<void(double, const SpectralScalar&, const SpectralVector&)>
        spectral_observer;
};

// March the conservation system to t_end, sampling diagnostics (and calling
// observers) every stride steps.  Throws blowup/cfl errors as configured.
std::pair<State, DiagnosticsRecord> simulate(const State& initial,
                                             const StepSchedule& schedule,
                                             const SimulateOptions& opts = {});

// Keller-Segel counterpart; diagnostics are recorded for the transformed
// state (p~ = u - p_infinity, q = -grad ln c), so the record has the same
// shape for every model.
struct SimulateKSOptions {
    double c_floor = 1e-8;
    double blowup_linf = 1e6;
    std::vector<std::function<void(const KSState&)>> observers;
};

std::pair<KSState, DiagnosticsRecord> simulate_ks(
    const KSState& initial, const StepSchedule& schedule,
    const SimulateKSOptions& opts = {});

// Advisory stability ratio dt*(max|q| + sqrt(max|p~|)) / min spacing;
// simulate escalates to an error when it exceeds cfl_safety.
double cfl_advisory(const State& s, double dt, const Grid& g);

} // namespace chemflow

#endif
