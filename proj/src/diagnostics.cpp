#include "chemflow/diagnostics.hpp"

#include <cmath>
#include <string>

#include "chemflow/errors.hpp"
#include "chemflow/spectral.hpp"

namespace chemflow {

namespace {

// sum over the full spectrum of  multiplier(|k|^2) * |c(m)|^2  with the
// amplitude normalization c = F/N, times the box volume.
template <class Mult>
double weighted_spectral_sum(const SpectralScalar& F, Mult&& mult) {
    const Grid& g = *F.grid;
    const double ninv = 1.0 / double(g.points());
    const int nzc = g.nz_spec();
    double acc = 0.0;
    long s = 0;
    for (int i0 = 0; i0 < g.n[0]; ++i0) {
        const double k0 = g.wavenumber[0][i0];
        for (int i1 = 0; i1 < g.n[1]; ++i1) {
            const double k1 = g.wavenumber[1][i1];
            for (int i2 = 0; i2 < nzc; ++i2, ++s) {
                const double k2v = g.wavenumber[2][i2];
                const double kk = k0 * k0 + k1 * k1 + k2v * k2v;
                const double w = hermitian_weight(g, i2);
                acc += w * mult(kk) * std::norm(F.c[s] * ninv);
            }
        }
    }
    return acc * g.volume();
}

double sobolev_multiplier(double k2, int k) {
    double m = 1.0, p = 1.0;
    for (int j = 1; j <= k; ++j) {
        p *= k2;
        m += p;
    }
    return m;
}

} // namespace

double spectral_l2(const SpectralScalar& F) {
    return std::sqrt(weighted_spectral_sum(F, [](double) { return 1.0; }));
}

double spectral_l2(const SpectralVector& F) {
    double acc = 0.0;
    for (const auto& c : F.comp) {
        const double n = spectral_l2(c);
        acc += n * n;
    }
    return std::sqrt(acc);
}

double spectral_hk(const SpectralScalar& F, int k) {
    if (k < 0 || k > 3)
        throw config_error("Sobolev order must be in {0,1,2,3}, got " +
                           std::to_string(k));
    return std::sqrt(weighted_spectral_sum(
        F, [k](double k2) { return sobolev_multiplier(k2, k); }));
}

double spectral_hk(const SpectralVector& F, int k) {
    double acc = 0.0;
    for (const auto& c : F.comp) {
        const double n = spectral_hk(c, k);
        acc += n * n;
    }
    return std::sqrt(acc);
}

double norm_l2(const ScalarField& f) { return spectral_l2(forward(f)); }
double norm_l2(const VectorField& f) { return spectral_l2(forward(f)); }
double norm_hk(const ScalarField& f, int k) { return spectral_hk(forward(f), k); }
double norm_hk(const VectorField& f, int k) { return spectral_hk(forward(f), k); }

double norm_linf(const ScalarField& f) {
    double m = 0.0;
    for (double x : f.v) m = std::max(m, std::abs(x));
    return m;
}

double norm_linf(const VectorField& f) {
    if (!f.grid) throw structure_error("vector field has no grid attached");
    const long n = f.grid->points();
    double m = 0.0;
    for (long i = 0; i < n; ++i) {
        double s = 0.0;
        for (const auto& c : f.comp) s += c.v[i] * c.v[i];
        m = std::max(m, s);
    }
    return std::sqrt(m);
}

double mass(const ScalarField& f) {
    if (!f.grid) throw structure_error("scalar field has no grid attached");
    double acc = 0.0;
    for (double x : f.v) acc += x;
    return acc * f.grid->volume() / double(f.grid->points());
}

namespace {

// grid quadrature of a pointwise product series; exact for trigonometric
// polynomials of bandwidth below the grid size.
double integrate(const Grid& g, const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc * g.volume() / double(g.points());
}

} // namespace

void append_sample(DiagnosticsRecord& rec, const Grid& g, double t,
                   const SpectralScalar& ph, const SpectralVector& qh) {
    if (!rec.t.empty() && !(t > rec.t.back()))
        throw structure_error("diagnostic samples must have increasing time");

    rec.t.push_back(t);
    rec.l2_p.push_back(spectral_l2(ph));
    rec.l2_q.push_back(spectral_l2(qh));
    rec.h1_p.push_back(spectral_hk(ph, 1));
    rec.h1_q.push_back(spectral_hk(qh, 1));
    rec.h2_p.push_back(spectral_hk(ph, 2));
    rec.h2_q.push_back(spectral_hk(qh, 2));
    rec.h3_p.push_back(spectral_hk(ph, 3));
    rec.h3_q.push_back(spectral_hk(qh, 3));

    SpectralVector gradp = gradient(ph);
    rec.l2_gradp.push_back(spectral_l2(gradp));
    rec.l2_divq.push_back(spectral_l2(divergence(qh)));
    double gq = 0.0;
    for (int a = 0; a < g.dim; ++a) {
        const double n = spectral_l2(gradient(qh.comp[a]));
        gq += n * n;
    }
    rec.l2_gradq.push_back(std::sqrt(gq));
    rec.l2_curlq.push_back(spectral_l2(curl(qh)));

    ScalarField p = inverse(ph);
    VectorField q = inverse(qh);
    rec.linf_p.push_back(norm_linf(p));
    rec.linf_q.push_back(norm_linf(q));
    rec.mass_p.push_back(mass(p));

    // Ledger work integrands.  q^T (grad q . q) = 1/2 q . grad(|q|^2).
    VectorField gp = inverse(gradp);
    std::vector<double> integrand(g.points());
    for (long i = 0; i < g.points(); ++i) {
        double dot = 0.0;
        for (int a = 0; a < g.dim; ++a) dot += q.comp[a].v[i] * gp.comp[a].v[i];
        integrand[i] = p.v[i] * dot;
    }
    rec.work_p.push_back(integrate(g, integrand));

    ScalarField q2(g);
    for (long i = 0; i < g.points(); ++i) {
        double s = 0.0;
        for (int a = 0; a < g.dim; ++a) s += q.comp[a].v[i] * q.comp[a].v[i];
        q2.v[i] = s;
    }
    VectorField gq2 = inverse(gradient(forward(q2)));
    for (long i = 0; i < g.points(); ++i) {
        double dot = 0.0;
        for (int a = 0; a < g.dim; ++a)
            dot += q.comp[a].v[i] * gq2.comp[a].v[i];
        integrand[i] = 0.5 * dot;
    }
    rec.work_q.push_back(integrate(g, integrand));
}

void append_sample(DiagnosticsRecord& rec, const State& s) {
    if (!s.p_tilde.grid)
        throw structure_error("state has no grid attached");
    append_sample(rec, *s.p_tilde.grid, s.time, forward(s.p_tilde),
                  forward(s.q));
}

std::vector<double> cumulative_simpson(const std::vector<double>& y, double h) {
    const std::size_t n = y.size();
    if (n < 3)
        throw config_error("Simpson quadrature needs at least 3 samples, got " +
                           std::to_string(n));
    std::vector<double> I(n, 0.0);
    for (std::size_t i = 2; i < n; i += 2)
        I[i] = I[i - 2] + h / 3.0 * (y[i - 2] + 4.0 * y[i - 1] + y[i]);
    for (std::size_t i = 1; i < n; i += 2) {
        // integral of the parabola through (i-1, i, i+1) over the left half;
        // the last sample, lacking a right neighbour, uses the parabola
        // through (i-2, i-1, i) over the right half.
        if (i + 1 < n)
            I[i] = I[i - 1] +
                   h / 12.0 * (5.0 * y[i - 1] + 8.0 * y[i] - y[i + 1]);
        else
            I[i] = I[i - 1] +
                   h / 12.0 * (-y[i - 2] + 8.0 * y[i - 1] + 5.0 * y[i]);
    }
    return I;
}

std::vector<double> energy_ledger(DiagnosticsRecord& rec,
                                  const ModelParams& params) {
    const std::size_t n = rec.size();
    if (n < 3)
        throw config_error("energy ledger needs at least 3 samples, got " +
                           std::to_string(n));
    const double h = rec.t[1] - rec.t[0];
    for (std::size_t i = 1; i < n; ++i) {
        const double dt = rec.t[i] - rec.t[i - 1];
        if (std::abs(dt - h) > 1e-9 * std::max(1.0, std::abs(h)))
            throw structure_error("ledger quadrature requires uniform sample "
                                  "spacing");
    }

    std::vector<double> gp2(n), gq2(n);
    for (std::size_t i = 0; i < n; ++i) {
        gp2[i] = rec.l2_gradp[i] * rec.l2_gradp[i];
        gq2[i] = rec.l2_gradq[i] * rec.l2_gradq[i];
    }
    const std::vector<double> Ip = cumulative_simpson(gp2, h);
    const std::vector<double> Iq = cumulative_simpson(gq2, h);
    const std::vector<double> Wp = cumulative_simpson(rec.work_p, h);
    const std::vector<double> Wq = cumulative_simpson(rec.work_q, h);

    rec.diss_p_acc.resize(n);
    rec.diss_q_acc.resize(n);
    rec.ledger_residual.resize(n);
    const double e0 =
        rec.l2_p[0] * rec.l2_p[0] + rec.l2_q[0] * rec.l2_q[0];
    for (std::size_t i = 0; i < n; ++i) {
        rec.diss_p_acc[i] = 2.0 * params.d * Ip[i];
        rec.diss_q_acc[i] = 2.0 * params.epsilon * Iq[i];
        const double lhs = rec.l2_p[i] * rec.l2_p[i] +
                           rec.l2_q[i] * rec.l2_q[i] + rec.diss_p_acc[i] +
                           rec.diss_q_acc[i];
        const double rhs = e0 - 2.0 * Wp[i] - 4.0 * params.epsilon * Wq[i];
        rec.ledger_residual[i] = lhs - rhs;
    }
    return rec.ledger_residual;
}

std::pair<double, double> nonlinear_ledger_crosscheck(const State& s) {
    if (!s.p_tilde.grid)
        throw structure_error("state has no grid attached");
    const Grid& g = *s.p_tilde.grid;
    SpectralScalar ph = forward(s.p_tilde);
    SpectralVector qh = forward(s.q);
    VectorField gp = inverse(gradient(ph));
    ScalarField dq = inverse(divergence(qh));

    std::vector<double> integrand(g.points());
    for (long i = 0; i < g.points(); ++i) {
        double dot = 0.0;
        for (int a = 0; a < g.dim; ++a)
            dot += s.q.comp[a].v[i] * gp.comp[a].v[i];
        integrand[i] = s.p_tilde.v[i] * dot;
    }
    const double direct = integrate(g, integrand);

    for (long i = 0; i < g.points(); ++i)
        integrand[i] = -0.5 * s.p_tilde.v[i] * s.p_tilde.v[i] * dq.v[i];
    const double by_parts = integrate(g, integrand);
    return {direct, by_parts};
}

std::pair<double, double> curl_mass_monitor(const State& s) {
    if (!s.q.grid)
        throw structure_error("state has no grid attached");
    return {spectral_l2(curl(forward(s.q))), mass(s.p_tilde)};
}

std::pair<double, double> divcurl_identity_check(const VectorField& q) {
    if (!q.grid) throw structure_error("vector field has no grid attached");
    SpectralVector qh = forward(q);
    double gq = 0.0;
    for (int a = 0; a < q.grid->dim; ++a) {
        const double n = spectral_l2(gradient(qh.comp[a]));
        gq += n * n;
    }
    return {std::sqrt(gq), spectral_l2(divergence(qh))};
}

} // namespace chemflow
