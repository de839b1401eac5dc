#include "chemflow/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

#include "chemflow/errors.hpp"
#include "chemflow/init_data.hpp"
#include "chemflow/integrator.hpp"
#include "chemflow/spectral.hpp"

namespace chemflow {

RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& errs) {
    if (eps.size() != errs.size())
        throw config_error("rate fit: mismatched input lengths");
    const std::size_t n = eps.size();
    if (n < 3) throw config_error("rate fit needs at least 3 points");
    for (double e : eps)
        if (!(e > 0.0) || !std::isfinite(e))
            throw config_error("rate fit: eps values must be positive");
    for (double e : errs)
        if (!std::isfinite(e) || !(e > 0.0))
            throw config_error("degenerate rate fit: errors must be positive");
    {
        std::vector<double> sorted(eps);
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw config_error("degenerate rate fit: eps values must be distinct");
    }

    std::vector<long double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = std::log(static_cast<long double>(eps[i]));
        y[i] = std::log(static_cast<long double>(errs[i]));
    }
    long double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const long double denom = n * sxx - sx * sx;
    if (denom <= 0)
        throw config_error("degenerate rate fit: eps values must be distinct");
    const long double slope = (n * sxy - sx * sy) / denom;
    const long double intercept = (sy - slope * sx) / n;

    const long double ybar = sy / n;
    long double ss_tot = 0, ss_res = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const long double r = y[i] - (intercept + slope * x[i]);
        ss_res += r * r;
        const long double d = y[i] - ybar;
        ss_tot += d * d;
    }
    RateFit fit;
    fit.slope = static_cast<double>(slope);
    fit.intercept = static_cast<double>(intercept);
    if (ss_tot > 0)
        fit.r2 = static_cast<double>(1.0L - ss_res / ss_tot);
    else
        fit.r2 = ss_res <= 1e-24L ? 1.0 : 0.0;
    return fit;
}

namespace {

struct Captured {
    std::vector<SpectralScalar> p;
    std::vector<SpectralVector> q;
};

struct MemberOut {
    Captured cap;
    DiagnosticsRecord rec;
    double seconds = 0.0;
};

// One member trajectory, grabbing coefficients at the comparison samples.
MemberOut run_one(const Grid& g, const RunConfig& cfg, double eps,
                  const std::vector<long>& cmp_samples, bool linearized) {
    ModelParams mp = cfg.params;
    mp.epsilon = eps;
    const ModelTag tag = eps > 0.0 ? ModelTag::diffusive : ModelTag::nondiffusive;
    const State init = gen_init(g, cfg.init, mp, tag);

    MemberOut out;
    out.cap.p.resize(cmp_samples.size());
    out.cap.q.resize(cmp_samples.size());

    long call = 0;
    SimulateOptions so;
    so.linearized = linearized;
    so.spectral_observer = [&](double, const SpectralScalar& ph,
                               const SpectralVector& qh) {
        auto it = std::lower_bound(cmp_samples.begin(), cmp_samples.end(), call);
        if (it != cmp_samples.end() && *it == call) {
            const std::size_t pos = static_cast<std::size_t>(it - cmp_samples.begin());
            out.cap.p[pos] = ph;
            out.cap.q[pos] = qh;
        }
        ++call;
    };

    const auto t0 = std::chrono::steady_clock::now();
    auto result = simulate(init, cfg.schedule, so);
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                      .count();
    out.rec = std::move(result.second);
    return out;
}

double pick_theta(const ErrorRow& r, const std::string& norm) {
    if (norm == "l2") return r.l2_theta;
    if (norm == "h1") return r.h1_theta;
    if (norm == "h2") return r.h2_theta;
    return r.linf_theta;
}

double pick_psi(const ErrorRow& r, const std::string& norm) {
    if (norm == "l2") return r.l2_psi;
    if (norm == "h1") return r.h1_psi;
    if (norm == "h2") return r.h2_psi;
    return r.linf_psi;
}

} // namespace

SweepResult run_sweep(const RunConfig& cfg, const SweepOptions& opts) {
    if (!cfg.sweep.present)
        throw config_error("sweep requires a [sweep] section in the config");
    cfg.schedule.validate();
    if (cfg.params.epsilon != 0.0)
        throw config_error("the sweep ladder supplies epsilon; leave "
                           "params.epsilon unset");
    cfg.params.validate(ModelTag::nondiffusive);

    SweepResult res;
    res.ladder = cfg.sweep.eps_ladder;
    for (double e : res.ladder)
        if (!(e > 0.0) || !std::isfinite(e))
            throw config_error("eps ladder values must be positive");
    std::sort(res.ladder.begin(), res.ladder.end(), std::greater<double>());
    for (std::size_t i = 1; i < res.ladder.size(); ++i)
        if (res.ladder[i] == res.ladder[i - 1])
            throw config_error("eps ladder values must be distinct");

    // Comparison times must land on the sampling grid.
    const long n_steps = cfg.schedule.n_steps();
    res.comparison_times = cfg.sweep.comparison_times;
    std::sort(res.comparison_times.begin(), res.comparison_times.end());
    std::vector<long> cmp_samples;
    for (double& tc : res.comparison_times) {
        const long j = std::lround(tc / cfg.schedule.dt);
        if (j < 0 || j > n_steps ||
            std::abs(double(j) * cfg.schedule.dt - tc) >
                1e-8 * std::max(1.0, std::abs(tc)))
            throw config_error("comparison time " + std::to_string(tc) +
                               " does not lie on the step grid");
        if (j % cfg.schedule.stride != 0)
            throw config_error("comparison time " + std::to_string(tc) +
                               " is skipped by the sampling stride");
        tc = double(j) * cfg.schedule.dt; // row time matches the sample's
        cmp_samples.push_back(j / cfg.schedule.stride);
    }
    for (std::size_t i = 1; i < cmp_samples.size(); ++i)
        if (cmp_samples[i] == cmp_samples[i - 1])
            throw config_error("duplicate comparison times");

    res.norms = cfg.sweep.norms;

    const Grid g = grid_from_spec(cfg.grid);

    // Baseline first: every member needs it.
    MemberOut base = run_one(g, cfg, 0.0, cmp_samples, opts.linearized);
    res.baseline_record = std::move(base.rec);
    res.baseline_seconds = base.seconds;

    const std::size_t nm = res.ladder.size();
    std::vector<MemberOut> outs(nm);
    std::vector<std::exception_ptr> failures(nm);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= nm) return;
            try {
                outs[i] = run_one(g, cfg, res.ladder[i], cmp_samples,
                                  opts.linearized);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    const int workers =
        std::min<int>(cfg.sweep.workers, static_cast<int>(nm));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (std::size_t i = 0; i < nm; ++i) {
        if (!failures[i]) continue;
        try {
            std::rethrow_exception(failures[i]);
        } catch (const blowup_error& b) {
            throw blowup_error("sweep aborted: member eps=" +
                                   format_double(res.ladder[i]) + ": " + b.what(),
                               b.time);
        }
        // anything else propagates with its own type
    }

    // Error rows by direct subtraction of coefficients.
    for (std::size_t mi = 0; mi < nm; ++mi) {
        res.member_records.push_back(std::move(outs[mi].rec));
        res.member_seconds.push_back(outs[mi].seconds);
        for (std::size_t c = 0; c < cmp_samples.size(); ++c) {
            SpectralScalar theta(g);
            for (long s = 0; s < g.spectral_size(); ++s)
                theta.c[s] = outs[mi].cap.p[c].c[s] - base.cap.p[c].c[s];
            SpectralVector psi(g);
            for (int a = 0; a < g.dim; ++a)
                for (long s = 0; s < g.spectral_size(); ++s)
                    psi.comp[a].c[s] =
                        outs[mi].cap.q[c].comp[a].c[s] - base.cap.q[c].comp[a].c[s];

            ErrorRow row;
            row.eps = res.ladder[mi];
            row.t = res.comparison_times[c];
            row.l2_theta = spectral_l2(theta);
            row.l2_psi = spectral_l2(psi);
            row.h1_theta = spectral_hk(theta, 1);
            row.h1_psi = spectral_hk(psi, 1);
            row.h2_theta = spectral_hk(theta, 2);
            row.h2_psi = spectral_hk(psi, 2);
            row.linf_theta = norm_linf(inverse(theta));
            row.linf_psi = norm_linf(inverse(psi));
            res.rows.push_back(row);
        }
    }

    // Supremum over comparison times per norm and ladder value.
    const std::size_t nt = cmp_samples.size();
    for (const char* norm : {"l2", "h1", "h2", "linf"}) {
        std::vector<double> sup(nm, 0.0);
        for (std::size_t mi = 0; mi < nm; ++mi)
            for (std::size_t c = 0; c < nt; ++c) {
                const ErrorRow& r = res.rows[mi * nt + c];
                const double th = pick_theta(r, norm);
                const double ps = pick_psi(r, norm);
                sup[mi] = std::max(sup[mi], std::hypot(th, ps));
            }
        res.sup_errors[norm] = std::move(sup);
    }

    // Monotonicity probe: for each time and norm, error should not grow as
    // eps shrinks (5% slack for prefactor noise).
    for (const char* norm : {"l2", "h1", "h2", "linf"})
        for (std::size_t c = 0; c < nt; ++c)
            for (std::size_t mi = 1; mi < nm; ++mi) {
                const ErrorRow& hi = res.rows[(mi - 1) * nt + c];
                const ErrorRow& lo = res.rows[mi * nt + c];
                const double e_hi = std::hypot(pick_theta(hi, norm), pick_psi(hi, norm));
                const double e_lo = std::hypot(pick_theta(lo, norm), pick_psi(lo, norm));
                if (e_lo > 1.05 * e_hi) res.monotone = false;
            }

    // Time-uniformity probe on sup H2 / sqrt(eps).
    {
        const auto& sup = res.sup_errors["h2"];
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (std::size_t mi = 0; mi < nm; ++mi) {
            const double u = sup[mi] / std::sqrt(res.ladder[mi]);
            lo = std::min(lo, u);
            hi = std::max(hi, u);
        }
        if (hi == 0.0)
            res.h2_uniformity_spread = 1.0;
        else if (lo == 0.0)
            res.h2_uniformity_spread = std::numeric_limits<double>::infinity();
        else
            res.h2_uniformity_spread = hi / lo;
    }

    // Rate fits on the requested norms.
    if (nm < 3) {
        res.fit_refused = true;
        res.fit_refusal = "rate fit needs at least 3 ladder values";
    } else {
        for (const auto& norm : res.norms) {
            const auto& sup = res.sup_errors[norm];
            if (std::any_of(sup.begin(), sup.end(),
                            [](double e) { return !(e > 0.0); })) {
                res.fit_refused = true;
                res.fit_refusal = "degenerate fit: zero " + norm + " error";
                res.fits.clear();
                break;
            }
            const RateFit f = fit_rate(res.ladder, sup);
            res.fits.push_back({norm, f.slope, f.intercept, f.r2});
        }
    }
    return res;
}

namespace {

double state_l2_difference(const State& a, const State& b) {
    SpectralScalar pa = forward(a.p_tilde);
    const SpectralScalar pb = forward(b.p_tilde);
    for (std::size_t s = 0; s < pa.c.size(); ++s) pa.c[s] -= pb.c[s];
    double acc = spectral_l2(pa);
    acc *= acc;
    for (int ax = 0; ax < a.p_tilde.grid->dim; ++ax) {
        SpectralScalar qa = forward(a.q.comp[ax]);
        const SpectralScalar qb = forward(b.q.comp[ax]);
        for (std::size_t s = 0; s < qa.c.size(); ++s) qa.c[s] -= qb.c[s];
        const double n = spectral_l2(qa);
        acc += n * n;
    }
    return std::sqrt(acc);
}

} // namespace

SelfConvergenceReport self_convergence(const RunConfig& cfg,
                                       const SelfConvergenceOptions& opts) {
    cfg.schedule.validate();
    SelfConvergenceReport rep;
    const Grid g = grid_from_spec(cfg.grid);
    const ModelTag tag =
        cfg.params.epsilon > 0.0 ? ModelTag::diffusive : ModelTag::nondiffusive;
    ModelParams params = cfg.params;
    params.validate(tag);

    SimulateOptions so;
    so.linearized = opts.linearized;

    // Unresolved initial data: nothing to study, report it instead of
    // failing (gen_init would reject the band below).
    if (cfg.init.band_limit > g.dealias_cutoff()) {
        rep.warnings.push_back(
            "initial band limit " + std::to_string(cfg.init.band_limit) +
            " exceeds the dealias cutoff " + std::to_string(g.dealias_cutoff()) +
            " of the grid; refinement study skipped");
        return rep;
    }

    // Temporal refinement: dt, dt/2, dt/4 against a dt/8 reference.
    const State init = gen_init(g, cfg.init, params, tag);
    std::vector<State> finals;
    for (int k = 0; k <= 3; ++k) {
        StepSchedule sch;
        sch.dt = cfg.schedule.dt / double(1 << k);
        sch.t_end = cfg.schedule.t_end;
        sch.cfl_safety = cfg.schedule.cfl_safety;
        sch.stride = static_cast<int>(std::lround(sch.t_end / sch.dt));
        finals.push_back(simulate(init, sch, so).first);
    }
    for (int k = 0; k < 3; ++k)
        rep.temporal_errors.push_back(state_l2_difference(finals[k], finals[3]));
    for (int k = 0; k < 2; ++k) {
        const double e0 = rep.temporal_errors[k];
        const double e1 = rep.temporal_errors[k + 1];
        rep.temporal_orders.push_back(e1 > 0.0 && e0 > 0.0 ? std::log2(e0 / e1)
                                                           : 0.0);
        if (e1 > e0)
            rep.warnings.push_back("temporal errors do not decrease under "
                                   "refinement; run under-resolved");
    }

    // Spatial: same trajectory on the doubled grid, compared over the coarse
    // grid's dealias-kept modes (amplitude coefficients are grid-independent).
    std::vector<int> fine_sizes;
    std::vector<double> extents;
    for (int a = 0; a < g.dim; ++a) {
        fine_sizes.push_back(2 * g.size(a));
        extents.push_back(g.length(a));
    }
    const Grid gf = make_grid(g.dim, fine_sizes, extents);
    const State init_f = gen_init(gf, cfg.init, params, tag);

    StepSchedule sch = cfg.schedule;
    sch.stride = static_cast<int>(sch.n_steps());
    const State fin_c = simulate(init, sch, so).first;
    const State fin_f = simulate(init_f, sch, so).first;

    const SpectralScalar pc = forward(fin_c.p_tilde);
    const SpectralScalar pf = forward(fin_f.p_tilde);
    const SpectralVector qc = forward(fin_c.q);
    const SpectralVector qf = forward(fin_f.q);

    const double ninv_c = 1.0 / double(g.points());
    const double ninv_f = 1.0 / double(gf.points());
    const int nzc = g.nz_spec();
    double acc = 0.0;
    long s = 0;
    for (int i0 = 0; i0 < g.n[0]; ++i0) {
        const int m0 = (i0 < (g.n[0] + 1) / 2) ? i0 : i0 - g.n[0];
        const long j0 = m0 >= 0 ? m0 : m0 + gf.n[0];
        for (int i1 = 0; i1 < g.n[1]; ++i1) {
            const int m1 = (i1 < (g.n[1] + 1) / 2) ? i1 : i1 - g.n[1];
            const long j1 = m1 >= 0 ? m1 : m1 + gf.n[1];
            for (int i2 = 0; i2 < nzc; ++i2, ++s) {
                if (!g.dealias_keep[s]) continue;
                const long sf = (j0 * gf.n[1] + j1) * gf.nz_spec() + i2;
                const double w = hermitian_weight(g, i2);
                auto add = [&](const std::complex<double>& cc,
                               const std::complex<double>& ff) {
                    const std::complex<double> d = ff * ninv_f - cc * ninv_c;
                    acc += w * std::norm(d);
                };
                add(pc.c[s], pf.c[sf]);
                for (int a = 0; a < g.dim; ++a)
                    add(qc.comp[a].c[s], qf.comp[a].c[sf]);
            }
        }
    }
    rep.spatial_error = std::sqrt(g.volume() * acc);
    rep.spatial_compared = true;
    rep.spectrally_resolved = rep.spatial_error < 1e-10;
    return rep;
}

} // namespace chemflow
