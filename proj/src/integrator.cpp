#include "chemflow/integrator.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "chemflow/errors.hpp"
#include "chemflow/spectral.hpp"

namespace chemflow {

void StepSchedule::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw config_error("schedule dt must be positive and finite");
    if (!(t_end > 0.0) || !std::isfinite(t_end))
        throw config_error("schedule t_end must be positive and finite");
    if (dt > t_end) throw config_error("schedule requires dt <= t_end");
    if (stride < 1) throw config_error("schedule stride must be >= 1");
    if (!(cfl_safety > 0.0) || cfl_safety > 1.0)
        throw config_error("cfl_safety must lie in (0, 1]");
    n_steps();
}

long StepSchedule::n_steps() const {
    const double ratio = t_end / dt;
    const long n = std::lround(ratio);
    if (n < 1 || std::abs(n * dt - t_end) > 1e-8 * t_end)
        throw config_error("t_end must be an integer number of dt steps");
    if (n % stride != 0)
        throw config_error("step count " + std::to_string(n) +
                           " must be a multiple of stride " +
                           std::to_string(stride));
    return n;
}

PropagatorTable::ModeOp mode_exponential(const std::array<double, 3>& k,
                                         const ModelParams& params,
                                         double dt) {
    using cplx = std::complex<double>;
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    PropagatorTable::ModeOp op;
    if (k2 == 0.0) {
        op.m00 = op.m11 = 1.0;
        op.m01 = op.m10 = 0.0;
        op.s = 1.0;
        return op;
    }
    const double a = params.d * k2;
    const double c = params.epsilon * k2;
    const double b = std::sqrt(k2);

    // Block A = [[-a, ib], [ib, -c]]; eigenvalues mean +- mu with
    // mu^2 = ((a-c)/2)^2 - b^2 (possibly negative).
    const double mean = -(a + c) / 2.0;
    const double half_gap_sq = 0.25 * (a - c) * (a - c) - b * b;
    const cplx mu = std::sqrt(cplx(half_gap_sq, 0.0));
    const double ebar = std::exp(mean * dt);

    cplx alpha, beta;
    if (2.0 * std::abs(mu) < 1e-8) {
        // eigenvalues nearly coincident: 2-term series e^{mean dt}(I + dt(A - mean I))
        alpha = ebar;
        beta = dt * ebar;
    } else {
        const cplx z = mu * dt;
        alpha = ebar * std::cosh(z);
        beta = dt * ebar * (std::sinh(z) / z);
    }
    // e^{A dt} = alpha I + beta (A - mean I),  A - mean I = [[-(a-c)/2, ib], [ib, (a-c)/2]]
    const double off = 0.5 * (a - c);
    op.m00 = alpha - beta * off;
    op.m11 = alpha + beta * off;
    op.m01 = beta * cplx(0.0, b);
    op.m10 = op.m01;
    op.s = std::exp(-c * dt);
    return op;
}

PropagatorTable build_propagators(const Grid& g, const ModelParams& params,
                                  double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw config_error("propagator step size must be positive");
    PropagatorTable tbl;
    tbl.grid = &g;
    tbl.params = params;
    tbl.dt = dt;
    const long ns = g.spectral_size();
    tbl.full.resize(ns);
    tbl.half.resize(ns);
    tbl.unit_k.resize(ns);

    const int nzc = g.nz_spec();
    long s = 0;
    for (int i0 = 0; i0 < g.n[0]; ++i0) {
        for (int i1 = 0; i1 < g.n[1]; ++i1) {
            for (int i2 = 0; i2 < nzc; ++i2, ++s) {
                const std::array<double, 3> k{g.wavenumber[0][i0],
                                              g.wavenumber[1][i1],
                                              g.wavenumber[2][i2]};
                tbl.full[s] = mode_exponential(k, params, dt);
                tbl.half[s] = mode_exponential(k, params, dt / 2.0);
                const double kn =
                    std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
                if (kn > 0.0)
                    tbl.unit_k[s] = {k[0] / kn, k[1] / kn, k[2] / kn};
                else
                    tbl.unit_k[s] = {0.0, 0.0, 0.0};
            }
        }
    }
    return tbl;
}

namespace {

using cplx = std::complex<double>;

struct SpecState {
    SpectralScalar p;
    SpectralVector q;
};

// Apply the mode-wise linear propagator in place.  The longitudinal
// amplitude is khat.q; transverse remainder is scaled by the scalar factor.
void apply_propagator(const Grid& g, const std::vector<PropagatorTable::ModeOp>& ops,
                      const std::vector<std::array<double, 3>>& unit_k,
                      SpecState& u) {
    const int dim = g.dim;
    const int shift = 3 - dim;
    const long ns = g.spectral_size();
    for (long s = 0; s < ns; ++s) {
        const PropagatorTable::ModeOp& op = ops[s];
        const std::array<double, 3>& kh = unit_k[s];
        cplx ql(0.0, 0.0);
        for (int a = 0; a < dim; ++a) ql += kh[a + shift] * u.q.comp[a].c[s];
        const cplx p_new = op.m00 * u.p.c[s] + op.m01 * ql;
        const cplx ql_new = op.m10 * u.p.c[s] + op.m11 * ql;
        const cplx ql_corr = ql_new - op.s * ql;
        u.p.c[s] = p_new;
        for (int a = 0; a < dim; ++a) {
            cplx& qa = u.q.comp[a].c[s];
            qa = op.s * qa + ql_corr * kh[a + shift];
        }
    }
}

SpecState axpy(const SpecState& x, double w, const SpecState& y, const Grid& g) {
    SpecState r;
    r.p = x.p;
    r.q = x.q;
    const long ns = g.spectral_size();
    for (long s = 0; s < ns; ++s) r.p.c[s] += w * y.p.c[s];
    for (int a = 0; a < g.dim; ++a)
        for (long s = 0; s < ns; ++s) r.q.comp[a].c[s] += w * y.q.comp[a].c[s];
    return r;
}

void add_scaled(SpecState& x, double w, const SpecState& y, const Grid& g) {
    const long ns = g.spectral_size();
    for (long s = 0; s < ns; ++s) x.p.c[s] += w * y.p.c[s];
    for (int a = 0; a < g.dim; ++a)
        for (long s = 0; s < ns; ++s) x.q.comp[a].c[s] += w * y.q.comp[a].c[s];
}

SpecState nonlinear(const Grid& g, const ModelParams& params,
                    const SpecState& u, bool linearized) {
    SpecState n;
    if (linearized) {
        n.p = SpectralScalar(g);
        n.q = SpectralVector(g);
        return n;
    }
    detail::conservation_nonlinear_spectral(g, params, u.p, u.q, n.p, n.q);
    return n;
}

// One IFRK4 step: exact linear transport between the four RK4 stages.
void ifrk4_step(const Grid& g, const PropagatorTable& tbl, double dt,
                bool linearized, SpecState& u) {
    const ModelParams& params = tbl.params;

    SpecState k1 = nonlinear(g, params, u, linearized);

    SpecState stage = axpy(u, dt / 2.0, k1, g);
    apply_propagator(g, tbl.half, tbl.unit_k, stage);
    SpecState k2 = nonlinear(g, params, stage, linearized);

    SpecState eh_u = u;
    apply_propagator(g, tbl.half, tbl.unit_k, eh_u);
    stage = axpy(eh_u, dt / 2.0, k2, g);
    SpecState k3 = nonlinear(g, params, stage, linearized);

    SpecState ef_u = u;
    apply_propagator(g, tbl.full, tbl.unit_k, ef_u);
    SpecState eh_k3 = k3;
    apply_propagator(g, tbl.half, tbl.unit_k, eh_k3);
    stage = axpy(ef_u, dt, eh_k3, g);
    SpecState k4 = nonlinear(g, params, stage, linearized);

    apply_propagator(g, tbl.full, tbl.unit_k, k1);  // E_full k1
    apply_propagator(g, tbl.half, tbl.unit_k, k2);  // E_half k2

    u = ef_u;
    add_scaled(u, dt / 6.0, k1, g);
    add_scaled(u, dt / 3.0, k2, g);
    add_scaled(u, dt / 3.0, eh_k3, g);
    add_scaled(u, dt / 6.0, k4, g);
}

void check_spectral_finite(const SpecState& u, const Grid& g, double t) {
    for (const auto& z : u.p.c)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw blowup_error("non-finite spectral state", t);
    for (int a = 0; a < g.dim; ++a)
        for (const auto& z : u.q.comp[a].c)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                throw blowup_error("non-finite spectral state", t);
}

} // namespace

State step(const State& s, const PropagatorTable& propagators, double dt) {
    if (!s.p_tilde.grid || !propagators.grid ||
        !s.p_tilde.grid->compatible(*propagators.grid))
        throw config_error("propagator table was built for a different grid");
    if (propagators.dt != dt)
        throw config_error("propagator table was built for dt = " +
                           std::to_string(propagators.dt) +
                           ", stepping with dt = " + std::to_string(dt));
    const Grid& g = *s.p_tilde.grid;

    SpecState u;
    u.p = forward(s.p_tilde);
    u.q = forward(s.q);
    dealias_in_place(u.p);
    dealias_in_place(u.q);
    ifrk4_step(g, propagators, dt, false, u);
    check_spectral_finite(u, g, s.time + dt);

    State out = s;
    out.time = s.time + dt;
    out.p_tilde = inverse(u.p);
    out.q = inverse(u.q);
    return out;
}

std::pair<State, DiagnosticsRecord> simulate(const State& initial,
                                             const StepSchedule& schedule,
                                             const SimulateOptions& opts) {
    schedule.validate();
    initial.params.validate(initial.model);
    if (initial.model == ModelTag::keller_segel)
        throw config_error("simulate expects a conservation-model state; use "
                           "the Keller-Segel driver for (u, c) states");
    if (!initial.p_tilde.grid || !initial.q.grid ||
        !initial.p_tilde.grid->compatible(*initial.q.grid))
        throw structure_error("state fields live on incompatible grids");
    const Grid& g = *initial.p_tilde.grid;
    const long n_steps = schedule.n_steps();

    SpecState u;
    u.p = forward(initial.p_tilde);
    u.q = forward(initial.q);
    dealias_in_place(u.p);
    dealias_in_place(u.q);

    {
        const double curl_n = spectral_l2(curl(u.q));
        double gq = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            const double n = spectral_l2(gradient(u.q.comp[a]));
            gq += n * n;
        }
        if (curl_n > 1e-8 * (1.0 + std::sqrt(gq)))
            std::fprintf(stderr,
                         "warning: initial q is not curl-free (|curl q| = %g); "
                         "curl-preservation guarantees do not apply\n",
                         curl_n);
    }

    const PropagatorTable tbl = build_propagators(g, initial.params, schedule.dt);

    DiagnosticsRecord rec;
    rec.params = initial.params;
    rec.model = initial.model;

    auto make_state = [&](double t) {
        State s;
        s.time = t;
        s.p_tilde = inverse(u.p);
        s.q = inverse(u.q);
        s.params = initial.params;
        s.model = initial.model;
        return s;
    };

    auto sample = [&](double t) {
        append_sample(rec, g, t, u.p, u.q);
        const double max_p = rec.linf_p.back();
        const double max_q = rec.linf_q.back();
        if (max_p > opts.blowup_linf)
            throw blowup_error("perturbation amplitude exceeded " +
                                   std::to_string(opts.blowup_linf),
                               t);
        const double ratio =
            schedule.dt * (max_q + std::sqrt(max_p)) / g.min_spacing();
        if (ratio > schedule.cfl_safety)
            throw cfl_error("advisory CFL ratio " + std::to_string(ratio) +
                                " exceeds safety factor " +
                                std::to_string(schedule.cfl_safety),
                            t);
        if (opts.spectral_observer) opts.spectral_observer(t, u.p, u.q);
        if (!opts.observers.empty()) {
            const State s = make_state(t);
            for (const auto& f : opts.observers) f(s);
        }
    };

    sample(initial.time);
    for (long i = 1; i <= n_steps; ++i) {
        ifrk4_step(g, tbl, schedule.dt, opts.linearized, u);
        const double t = initial.time + double(i) * schedule.dt;
        check_spectral_finite(u, g, t);
        if (i % schedule.stride == 0) sample(t);
    }

    if (rec.size() >= 3) {
        energy_ledger(rec, initial.params);
    } else {
        rec.diss_p_acc.assign(rec.size(), 0.0);
        rec.diss_q_acc.assign(rec.size(), 0.0);
        rec.ledger_residual.assign(rec.size(), 0.0);
    }
    return {make_state(initial.time + double(n_steps) * schedule.dt), rec};
}

double cfl_advisory(const State& s, double dt, const Grid& g) {
    const double max_q = norm_linf(s.q);
    const double max_p = norm_linf(s.p_tilde);
    return dt * (max_q + std::sqrt(max_p)) / g.min_spacing();
}

// ---------------------------------------------------------------------------
// Keller-Segel driver: diagonal linear propagators exp(-d|k|^2 dt) for u and
// exp(-eps|k|^2 dt) for c, same IFRK4 stage structure.

namespace {

struct KSSpecState {
    SpectralScalar u, c;
};

struct KSPropagators {
    std::vector<double> u_full, u_half, c_full, c_half;
};

KSPropagators build_ks_propagators(const Grid& g, const ModelParams& params,
                                   double dt) {
    KSPropagators P;
    const long ns = g.spectral_size();
    P.u_full.resize(ns);
    P.u_half.resize(ns);
    P.c_full.resize(ns);
    P.c_half.resize(ns);
    const int nzc = g.nz_spec();
    long s = 0;
    for (int i0 = 0; i0 < g.n[0]; ++i0) {
        const double k0 = g.wavenumber[0][i0];
        for (int i1 = 0; i1 < g.n[1]; ++i1) {
            const double k1 = g.wavenumber[1][i1];
            for (int i2 = 0; i2 < nzc; ++i2, ++s) {
                const double k2v = g.wavenumber[2][i2];
                const double kk = k0 * k0 + k1 * k1 + k2v * k2v;
                P.u_full[s] = std::exp(-params.d * kk * dt);
                P.u_half[s] = std::exp(-params.d * kk * dt / 2.0);
                P.c_full[s] = std::exp(-params.epsilon * kk * dt);
                P.c_half[s] = std::exp(-params.epsilon * kk * dt / 2.0);
            }
        }
    }
    return P;
}

void ks_apply(const std::vector<double>& pu, const std::vector<double>& pc,
              KSSpecState& st) {
    for (std::size_t s = 0; s < pu.size(); ++s) st.u.c[s] *= pu[s];
    for (std::size_t s = 0; s < pc.size(); ++s) st.c.c[s] *= pc[s];
}

KSSpecState ks_axpy(const KSSpecState& x, double w, const KSSpecState& y) {
    KSSpecState r = x;
    for (std::size_t s = 0; s < r.u.c.size(); ++s) r.u.c[s] += w * y.u.c[s];
    for (std::size_t s = 0; s < r.c.c.size(); ++s) r.c.c[s] += w * y.c.c[s];
    return r;
}

void ks_add_scaled(KSSpecState& x, double w, const KSSpecState& y) {
    for (std::size_t s = 0; s < x.u.c.size(); ++s) x.u.c[s] += w * y.u.c[s];
    for (std::size_t s = 0; s < x.c.c.size(); ++s) x.c.c[s] += w * y.c.c[s];
}

} // namespace

std::pair<KSState, DiagnosticsRecord> simulate_ks(
    const KSState& initial, const StepSchedule& schedule,
    const SimulateKSOptions& opts) {
    schedule.validate();
    initial.params.validate(ModelTag::keller_segel);
    if (!initial.u.grid || !initial.c.grid ||
        !initial.u.grid->compatible(*initial.c.grid))
        throw structure_error("KS state fields live on incompatible grids");
    const Grid& g = *initial.u.grid;
    const long n_steps = schedule.n_steps();
    const ModelParams& params = initial.params;

    KSSpecState u;
    u.u = forward(initial.u);
    u.c = forward(initial.c);
    dealias_in_place(u.u);
    dealias_in_place(u.c);

    const KSPropagators P = build_ks_propagators(g, params, schedule.dt);

    DiagnosticsRecord rec;
    rec.params = params;
    rec.model = ModelTag::keller_segel;

    auto nonlinear_at = [&](const KSSpecState& st, double t) {
        KSSpecState n;
        detail::ks_nonlinear_spectral(g, params, st.u, st.c, t, opts.c_floor,
                                      n.u, n.c);
        return n;
    };

    auto make_state = [&](double t) {
        KSState s;
        s.time = t;
        s.u = inverse(u.u);
        s.c = inverse(u.c);
        s.params = params;
        return s;
    };

    // Diagnostics on the transformed variables p~ = u - p_inf, q = -grad ln c.
    auto sample = [&](double t) {
        ScalarField cc = inverse(u.c);
        double cmin = cc.v.empty() ? 0.0 : cc.v[0];
        for (double x : cc.v) cmin = std::min(cmin, x);
        if (cmin < opts.c_floor)
            throw positivity_error("concentration fell below floor " +
                                       std::to_string(opts.c_floor),
                                   t);
        ScalarField lg(g);
        for (long i = 0; i < g.points(); ++i) lg.v[i] = std::log(cc.v[i]);
        SpectralVector qh = gradient(forward(lg));
        for (int a = 0; a < g.dim; ++a)
            for (auto& z : qh.comp[a].c) z = -z;
        SpectralScalar ph = u.u;
        ph.c[0] -= params.p_infinity * double(g.points());

        append_sample(rec, g, t, ph, qh);
        const double max_p = rec.linf_p.back();
        const double max_q = rec.linf_q.back();
        if (max_p > opts.blowup_linf)
            throw blowup_error("perturbation amplitude exceeded " +
                                   std::to_string(opts.blowup_linf),
                               t);
        const double ratio =
            schedule.dt * (max_q + std::sqrt(max_p)) / g.min_spacing();
        if (ratio > schedule.cfl_safety)
            throw cfl_error("advisory CFL ratio " + std::to_string(ratio) +
                                " exceeds safety factor " +
                                std::to_string(schedule.cfl_safety),
                            t);
        if (!opts.observers.empty()) {
            const KSState s = make_state(t);
            for (const auto& f : opts.observers) f(s);
        }
    };

    sample(initial.time);
    for (long i = 1; i <= n_steps; ++i) {
        const double t0 = initial.time + double(i - 1) * schedule.dt;
        const double dt = schedule.dt;

        KSSpecState k1 = nonlinear_at(u, t0);
        KSSpecState stage = ks_axpy(u, dt / 2.0, k1);
        ks_apply(P.u_half, P.c_half, stage);
        KSSpecState k2 = nonlinear_at(stage, t0 + dt / 2.0);

        KSSpecState eh_u = u;
        ks_apply(P.u_half, P.c_half, eh_u);
        stage = ks_axpy(eh_u, dt / 2.0, k2);
        KSSpecState k3 = nonlinear_at(stage, t0 + dt / 2.0);

        KSSpecState ef_u = u;
        ks_apply(P.u_full, P.c_full, ef_u);
        KSSpecState eh_k3 = k3;
        ks_apply(P.u_half, P.c_half, eh_k3);
        stage = ks_axpy(ef_u, dt, eh_k3);
        KSSpecState k4 = nonlinear_at(stage, t0 + dt);

        ks_apply(P.u_full, P.c_full, k1);
        ks_apply(P.u_half, P.c_half, k2);

        u = ef_u;
        ks_add_scaled(u, dt / 6.0, k1);
        ks_add_scaled(u, dt / 3.0, k2);
        ks_add_scaled(u, dt / 3.0, eh_k3);
        ks_add_scaled(u, dt / 6.0, k4);

        const double t = initial.time + double(i) * schedule.dt;
        for (const auto& z : u.u.c)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                throw blowup_error("non-finite spectral state", t);
        if (i % schedule.stride == 0) sample(t);
    }

    if (rec.size() >= 3) {
        energy_ledger(rec, params);
    } else {
        rec.diss_p_acc.assign(rec.size(), 0.0);
        rec.diss_q_acc.assign(rec.size(), 0.0);
        rec.ledger_residual.assign(rec.size(), 0.0);
    }
    return {make_state(initial.time + double(n_steps) * schedule.dt), rec};
}

} // namespace chemflow
