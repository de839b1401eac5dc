#ifndef CHEMFLOW_SWEEP_HPP
#define CHEMFLOW_SWEEP_HPP

#include <map>
#include <string>
#include <vector>

#include "chemflow/config.hpp"
#include "chemflow/csv.hpp"
#include "chemflow/diagnostics.hpp"

namespace chemflow {

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

// Least squares on (log eps_i, log e_i).  Needs >= 3 pairs, all positive;
// a zero error makes the fit degenerate and is refused.
RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& errs);

struct SweepOptions {
    bool linearized = false;
};

// Vanishing-diffusion study: one baseline run at eps = 0 and one member run
// per ladder value, identical grid, dt and initial data; errors by direct
// field subtraction at the comparison times.
struct SweepResult {
    std::vector<double> ladder;           // sorted descending
    std::vector<double> comparison_times; // sorted ascending
    std::vector<ErrorRow> rows;           // ladder-major, time-minor

    std::vector<std::string> norms; // the fitted subset, config order
    std::vector<RateRow> fits;      // one row per fitted norm
    bool fit_refused = false;
    std::string fit_refusal;

    // per norm: sup over comparison times of sqrt(theta^2 + psi^2), one
    // entry per ladder value
    std::map<std::string, std::vector<double>> sup_errors;

    DiagnosticsRecord baseline_record;
    std::vector<DiagnosticsRecord> member_records;
    double baseline_seconds = 0.0;
    std::vector<double> member_seconds;

    // probes (reported, not enforced)
    bool monotone = true;          // errors non-increasing in eps, 5% slack
    double h2_uniformity_spread = 1.0; // max/min over ladder of sup_t H2 / sqrt(eps)
};

SweepResult run_sweep(const RunConfig& cfg, const SweepOptions& opts = {});

// Discretization sanity study on the configured problem: dt ladder
// {dt, dt/2, dt/4} against a dt/8 reference, and a coarse-vs-doubled-grid
// comparison restricted to the coarse grid's dealias-kept modes.
struct SelfConvergenceOptions {
    bool linearized = false;
};

struct SelfConvergenceReport {
    std::vector<double> temporal_errors; // at dt, dt/2, dt/4
    std::vector<double> temporal_orders; // successive log2 ratios
    double spatial_error = 0.0;
    bool spatial_compared = false;
    bool spectrally_resolved = false; // spatial_error < 1e-10
    std::vector<std::string> warnings;
};

SelfConvergenceReport self_convergence(const RunConfig& cfg,
                                       const SelfConvergenceOptions& opts = {});

} // namespace chemflow

#endif
