#include "chemflow/hopf_cole.hpp"

#include <cmath>
#include <string>

#include "chemflow/diagnostics.hpp"
#include "chemflow/errors.hpp"
#include "chemflow/spectral.hpp"

namespace chemflow {
namespace hopf_cole {

State forward(const KSState& ks) {
    if (!ks.u.grid || !ks.c.grid || !ks.u.grid->compatible(*ks.c.grid))
        throw structure_error("KS state fields live on incompatible grids");
    const Grid& g = *ks.u.grid;
    for (double x : ks.c.v)
        if (!(x > 0.0))
            throw positivity_error("concentration must be strictly positive "
                                   "for the logarithmic transform",
                                   ks.time);

    State s;
    s.time = ks.time;
    s.params = ks.params;
    s.model = ks.params.epsilon > 0.0 ? ModelTag::diffusive
                                      : ModelTag::nondiffusive;
    s.p_tilde = ScalarField(g);
    for (long i = 0; i < g.points(); ++i)
        s.p_tilde.v[i] = ks.u.v[i] - ks.params.p_infinity;

    ScalarField lg(g);
    for (long i = 0; i < g.points(); ++i) lg.v[i] = std::log(ks.c.v[i]);
    // qualified: this namespace's forward/inverse shadow the transforms
    SpectralVector qh = gradient(chemflow::forward(lg));
    for (int a = 0; a < g.dim; ++a)
        for (auto& z : qh.comp[a].c) z = -z;
    s.q = chemflow::inverse(qh);
    return s;
}

KSState inverse(const State& s, double normalization) {
    if (!s.p_tilde.grid || !s.q.grid ||
        !s.p_tilde.grid->compatible(*s.q.grid))
        throw structure_error("state fields live on incompatible grids");
    if (!std::isfinite(normalization))
        throw config_error("normalization must be finite");
    const Grid& g = *s.p_tilde.grid;

    SpectralVector qh = chemflow::forward(s.q);
    {
        const double curl_n = spectral_l2(curl(qh));
        double gq = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            const double n = spectral_l2(gradient(qh.comp[a]));
            gq += n * n;
        }
        if (curl_n > 1e-8 * (1.0 + std::sqrt(gq)))
            throw structure_error(
                "q is not curl-free (|curl q| = " + std::to_string(curl_n) +
                "); the logarithmic potential does not exist");
    }

    // phi_hat(m) = -i k.q_hat(m) / |k|^2; the free constant sets mean(ln c).
    SpectralScalar phih(g);
    const int nzc = g.nz_spec();
    const std::complex<double> iu(0.0, 1.0);
    long idx = 0;
    for (int i0 = 0; i0 < g.n[0]; ++i0) {
        const double k0 = g.wavenumber[0][i0];
        for (int i1 = 0; i1 < g.n[1]; ++i1) {
            const double k1 = g.wavenumber[1][i1];
            for (int i2 = 0; i2 < nzc; ++i2, ++idx) {
                const double k2v = g.wavenumber[2][i2];
                const double kk = k0 * k0 + k1 * k1 + k2v * k2v;
                if (kk == 0.0) continue;
                const std::array<double, 3> k{k0, k1, k2v};
                std::complex<double> kq(0.0, 0.0);
                for (int a = 0; a < g.dim; ++a)
                    kq += k[a + 3 - g.dim] * qh.comp[a].c[idx];
                phih.c[idx] = -iu * kq / kk;
            }
        }
    }
    phih.c[0] = -normalization * double(g.points());

    {
        SpectralVector gp = gradient(phih);
        double resid2 = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            SpectralScalar diff = gp.comp[a];
            for (long i = 0; i < g.spectral_size(); ++i)
                diff.c[i] -= qh.comp[a].c[i];
            const double n = spectral_l2(diff);
            resid2 += n * n;
        }
        if (std::sqrt(resid2) > 1e-8)
            throw structure_error("potential reconstruction residual " +
                                  std::to_string(std::sqrt(resid2)) +
                                  " exceeds 1e-8 (q has a nonzero mean or "
                                  "rotational part)");
    }

    ScalarField phi = chemflow::inverse(phih);
    KSState ks;
    ks.time = s.time;
    ks.params = s.params;
    ks.c = ScalarField(g);
    ks.u = ScalarField(g);
    for (long i = 0; i < g.points(); ++i) {
        ks.c.v[i] = std::exp(-phi.v[i]);
        ks.u.v[i] = s.p_tilde.v[i] + s.params.p_infinity;
    }
    return ks;
}

ScaledParams apply_scaling(const ModelParams& params) {
    if (!(params.chi > 0.0) || !(params.alpha > 0.0))
        throw config_error("scaling requires chi > 0 and alpha > 0");
    ScaledParams sp;
    sp.scaling.chi = params.chi;
    sp.scaling.alpha = params.alpha;
    sp.scaling.time_factor = params.alpha;
    sp.scaling.space_factor = std::sqrt(params.alpha / params.chi);
    sp.scaling.q_factor = std::sqrt(params.chi / params.alpha);
    sp.params = params;
    sp.params.d = params.d / params.chi;
    sp.params.epsilon = params.epsilon / params.chi;
    sp.params.chi = 1.0;
    sp.params.alpha = 1.0;
    return sp;
}

ModelParams invert_scaling(const ScaledParams& sp) {
    ModelParams p = sp.params;
    p.d = sp.params.d * sp.scaling.chi;
    p.epsilon = sp.params.epsilon * sp.scaling.chi;
    p.chi = sp.scaling.chi;
    p.alpha = sp.scaling.alpha;
    return p;
}

Grid scaled_grid(const Grid& g, const ScalingDescriptor& scaling) {
    std::vector<int> sizes(g.dim);
    std::vector<double> extents(g.dim);
    for (int a = 0; a < g.dim; ++a) {
        sizes[a] = g.size(a);
        extents[a] = g.length(a) * scaling.space_factor;
    }
    return make_grid(g.dim, sizes, extents);
}

namespace {

State relabel(const State& s, const Grid& target, double q_scale,
              double time_scale, const ModelParams& params, ModelTag model) {
    if (!s.p_tilde.grid)
        throw structure_error("state has no grid attached");
    const Grid& g = *s.p_tilde.grid;
    if (target.dim != g.dim)
        throw config_error("scaled grid has a different dimension");
    for (int a = 0; a < g.dim; ++a)
        if (target.size(a) != g.size(a))
            throw config_error("scaled grid must keep the lattice sizes");

    State out;
    out.time = s.time * time_scale;
    out.params = params;
    out.model = model;
    out.p_tilde = ScalarField(target);
    out.p_tilde.v = s.p_tilde.v;
    out.q = VectorField(target);
    for (int a = 0; a < g.dim; ++a) {
        out.q.comp[a].v = s.q.comp[a].v;
        for (double& x : out.q.comp[a].v) x *= q_scale;
    }
    return out;
}

} // namespace

State apply_scaling_state(const State& s, const ScalingDescriptor& scaling,
                          const Grid& scaled) {
    ModelParams p = s.params;
    p.d = s.params.d / scaling.chi;
    p.epsilon = s.params.epsilon / scaling.chi;
    p.chi = 1.0;
    p.alpha = 1.0;
    const ModelTag tag = p.epsilon > 0.0 ? ModelTag::diffusive
                                         : ModelTag::nondiffusive;
    return relabel(s, scaled, scaling.q_factor, scaling.time_factor, p, tag);
}

State invert_scaling_state(const State& s, const ScalingDescriptor& scaling,
                           const Grid& original) {
    ModelParams p = s.params;
    p.d = s.params.d * scaling.chi;
    p.epsilon = s.params.epsilon * scaling.chi;
    p.chi = scaling.chi;
    p.alpha = scaling.alpha;
    const ModelTag tag = p.epsilon > 0.0 ? ModelTag::diffusive
                                         : ModelTag::nondiffusive;
    return relabel(s, original, 1.0 / scaling.q_factor,
                   1.0 / scaling.time_factor, p, tag);
}

} // namespace hopf_cole
} // namespace chemflow
