#include "chemflow/dynamics.hpp"

#include <cmath>
#include <string>

#include "chemflow/errors.hpp"
#include "chemflow/spectral.hpp"

namespace chemflow {

const char* model_name(ModelTag tag) {
    switch (tag) {
        case ModelTag::diffusive: return "diffusive";
        case ModelTag::nondiffusive: return "nondiffusive";
        case ModelTag::keller_segel: return "ks";
    }
    return "?";
}

ModelTag model_from_name(const std::string& name) {
    if (name == "diffusive") return ModelTag::diffusive;
    if (name == "nondiffusive") return ModelTag::nondiffusive;
    if (name == "ks" || name == "keller_segel") return ModelTag::keller_segel;
    throw config_error("unknown model '" + name +
                       "' (expected diffusive, nondiffusive or ks)");
}

void ModelParams::validate(ModelTag tag) const {
    if (!(d > 0.0) || !std::isfinite(d))
        throw config_error("parameter d must be positive and finite");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
        throw config_error("parameter epsilon must be nonnegative and finite");
    if (!(p_infinity > 0.0) || !std::isfinite(p_infinity))
        throw config_error("parameter p_infinity must be positive and finite");
    if (!(chi > 0.0) || !std::isfinite(chi))
        throw config_error("parameter chi must be positive and finite");
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw config_error("parameter alpha must be positive and finite");
    if (tag == ModelTag::nondiffusive && epsilon != 0.0)
        throw config_error("nondiffusive model requires epsilon = 0");
    if (tag == ModelTag::diffusive && epsilon == 0.0)
        throw config_error("diffusive model requires epsilon > 0 "
                           "(use the nondiffusive model for epsilon = 0)");
}

namespace {

void check_finite(const std::vector<double>& v, double t, const char* what) {
    for (double x : v)
        if (!std::isfinite(x))
            throw blowup_error(std::string("non-finite ") + what, t);
}

} // namespace

namespace detail {

void conservation_nonlinear_spectral(const Grid& g, const ModelParams& params,
                                     const SpectralScalar& p,
                                     const SpectralVector& q,
                                     SpectralScalar& dp, SpectralVector& dq) {
    ScalarField pp = inverse(p);
    VectorField qq = inverse(q);

    // div(p q): products in physical space, then transform + dealias.
    SpectralVector flux(g);
    for (int a = 0; a < g.dim; ++a) {
        ScalarField w(g);
        for (long i = 0; i < g.points(); ++i) w.v[i] = pp.v[i] * qq.comp[a].v[i];
        flux.comp[a] = forward(w);
    }
    dealias_in_place(flux);
    dp = divergence(flux);

    if (params.epsilon == 0.0) {
        dq = SpectralVector(g); // exactly zero, no epsilon scaling anywhere
        return;
    }
    ScalarField q2(g);
    for (long i = 0; i < g.points(); ++i) {
        double s = 0.0;
        for (int a = 0; a < g.dim; ++a) s += qq.comp[a].v[i] * qq.comp[a].v[i];
        q2.v[i] = s;
    }
    SpectralScalar q2h = forward(q2);
    dealias_in_place(q2h);
    dq = gradient(q2h);
    for (int a = 0; a < g.dim; ++a)
        for (auto& z : dq.comp[a].c) z *= -params.epsilon;
}

void ks_nonlinear_spectral(const Grid& g, const ModelParams& params,
                           const SpectralScalar& u, const SpectralScalar& c,
                           double time, double c_floor,
                           SpectralScalar& du, SpectralScalar& dc) {
    ScalarField uu = inverse(u);
    ScalarField cc = inverse(c);
    check_finite(uu.v, time, "u");
    check_finite(cc.v, time, "c");
    for (double x : cc.v)
        if (x < c_floor)
            throw positivity_error("concentration fell below floor " +
                                       std::to_string(c_floor),
                                   time);

    // chemotactic flux -chi * div(u grad(ln c))
    ScalarField lg(g);
    for (long i = 0; i < g.points(); ++i) lg.v[i] = std::log(cc.v[i]);
    VectorField grad_lg = inverse(gradient(forward(lg)));
    SpectralVector flux(g);
    for (int a = 0; a < g.dim; ++a) {
        ScalarField w(g);
        for (long i = 0; i < g.points(); ++i)
            w.v[i] = uu.v[i] * grad_lg.comp[a].v[i];
        flux.comp[a] = forward(w);
    }
    dealias_in_place(flux);
    SpectralScalar divflux = divergence(flux);
    du = SpectralScalar(g);
    for (long s = 0; s < g.spectral_size(); ++s)
        du.c[s] = -params.chi * divflux.c[s];

    // consumption -alpha * u c
    ScalarField uc(g);
    for (long i = 0; i < g.points(); ++i) uc.v[i] = uu.v[i] * cc.v[i];
    dc = forward(uc);
    dealias_in_place(dc);
    for (auto& z : dc.c) z *= -params.alpha;
}

} // namespace detail

std::pair<ScalarField, VectorField> nonlinear_rhs_conservation(const State& s) {
    if (s.model == ModelTag::keller_segel)
        throw config_error("nonlinear_rhs_conservation requires a "
                           "conservation-model state");
    if (!s.p_tilde.grid || !s.q.grid || !s.p_tilde.grid->compatible(*s.q.grid))
        throw structure_error("state fields live on incompatible grids");
    const Grid& g = *s.p_tilde.grid;
    check_finite(s.p_tilde.v, s.time, "p_tilde");
    for (int a = 0; a < g.dim; ++a) check_finite(s.q.comp[a].v, s.time, "q");

    // Only the products are dealiased; the inputs enter as given.
    SpectralScalar ph = forward(s.p_tilde);
    SpectralVector qh = forward(s.q);
    SpectralScalar dp;
    SpectralVector dq;
    detail::conservation_nonlinear_spectral(g, s.params, ph, qh, dp, dq);
    return {inverse(dp), inverse(dq)};
}

LinearBlock linear_block(const std::array<double, 3>& k,
                         const ModelParams& params) {
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    LinearBlock b;
    if (k2 == 0.0) {
        b.m00 = b.m01 = b.m10 = b.m11 = 0.0;
        b.transverse_rate = 0.0;
        return b;
    }
    const double kn = std::sqrt(k2);
    b.m00 = std::complex<double>(-params.d * k2, 0.0);
    b.m01 = std::complex<double>(0.0, kn);
    b.m10 = std::complex<double>(0.0, kn);
    b.m11 = std::complex<double>(-params.epsilon * k2, 0.0);
    b.transverse_rate = -params.epsilon * k2;
    return b;
}

std::pair<ScalarField, ScalarField> ks_rhs(const KSState& s, double c_floor) {
    if (!s.u.grid || !s.c.grid || !s.u.grid->compatible(*s.c.grid))
        throw structure_error("KS state fields live on incompatible grids");
    const Grid& g = *s.u.grid;

    SpectralScalar uh = forward(s.u);
    SpectralScalar ch = forward(s.c);
    SpectralScalar du_n, dc_n;
    detail::ks_nonlinear_spectral(g, s.params, uh, ch, s.time, c_floor, du_n,
                                  dc_n);
    SpectralScalar lap_u = laplacian(uh);
    SpectralScalar lap_c = laplacian(ch);
    for (long i = 0; i < g.spectral_size(); ++i) {
        du_n.c[i] += s.params.d * lap_u.c[i];
        dc_n.c[i] += s.params.epsilon * lap_c.c[i];
    }
    return {inverse(du_n), inverse(dc_n)};
}

} // namespace chemflow
