#include <doctest.h>

#include <cmath>
#include <complex>

#include "chemflow/diagnostics.hpp"
#include "chemflow/dynamics.hpp"
#include "chemflow/errors.hpp"
#include "chemflow/spectral.hpp"
#include "test_util.hpp"

using namespace chemflow;

namespace {

State make_state(const Grid& g, ModelTag tag, double eps) {
    State s;
    s.time = 0.0;
    s.p_tilde = ScalarField(g);
    s.q = VectorField(g);
    s.params.epsilon = eps;
    s.model = tag;
    return s;
}

} // namespace

TEST_CASE("model names round trip and reject junk") {
    CHECK(model_from_name("diffusive") == ModelTag::diffusive);
    CHECK(model_from_name("nondiffusive") == ModelTag::nondiffusive);
    CHECK(model_from_name("ks") == ModelTag::keller_segel);
    CHECK(model_from_name("keller_segel") == ModelTag::keller_segel);
    for (ModelTag t : {ModelTag::diffusive, ModelTag::nondiffusive,
                       ModelTag::keller_segel})
        CHECK(model_from_name(model_name(t)) == t);
    CHECK_THROWS_AS(model_from_name("euler"), config_error);
}

TEST_CASE("parameter validation") {
    ModelParams p;
    p.epsilon = 0.1;
    CHECK_NOTHROW(p.validate(ModelTag::diffusive));

    SUBCASE("nondiffusive forbids epsilon > 0") {
        CHECK_THROWS_AS(p.validate(ModelTag::nondiffusive), config_error);
    }
    SUBCASE("diffusive forbids epsilon = 0") {
        p.epsilon = 0.0;
        CHECK_THROWS_AS(p.validate(ModelTag::diffusive), config_error);
        CHECK_NOTHROW(p.validate(ModelTag::nondiffusive));
    }
    SUBCASE("d must be positive") {
        p.d = 0.0;
        CHECK_THROWS_AS(p.validate(ModelTag::diffusive), config_error);
        p.d = -1.0;
        CHECK_THROWS_AS(p.validate(ModelTag::diffusive), config_error);
    }
    SUBCASE("p_infinity must be positive") {
        p.p_infinity = 0.0;
        CHECK_THROWS_AS(p.validate(ModelTag::diffusive), config_error);
    }
    SUBCASE("chi and alpha must be positive") {
        ModelParams k;
        k.epsilon = 0.1;
        k.chi = 0.0;
        CHECK_THROWS_AS(k.validate(ModelTag::keller_segel), config_error);
        k.chi = 1.0;
        k.alpha = -2.0;
        CHECK_THROWS_AS(k.validate(ModelTag::keller_segel), config_error);
    }
    SUBCASE("non-finite values rejected") {
        p.epsilon = std::nan("");
        CHECK_THROWS_AS(p.validate(ModelTag::diffusive), config_error);
    }
}

TEST_CASE("nonlinear terms vanish on zero and constant states") {
    Grid g = tu::grid2(16, 16);

    State s = make_state(g, ModelTag::diffusive, 0.1);
    auto [dp0, dq0] = nonlinear_rhs_conservation(s);
    for (double v : dp0.v) CHECK(v == 0.0);
    for (int a = 0; a < 2; ++a)
        for (double v : dq0.comp[a].v) CHECK(v == 0.0);

    // constant p_tilde, zero q: the flux p*q is identically zero
    for (double& v : s.p_tilde.v) v = 3.25;
    auto [dp1, dq1] = nonlinear_rhs_conservation(s);
    CHECK(tu::max_abs_diff(dp1.v, ScalarField(g).v) < 1e-14);
    for (int a = 0; a < 2; ++a)
        CHECK(tu::max_abs_diff(dq1.comp[a].v, ScalarField(g).v) < 1e-14);
}

TEST_CASE("one dimensional trig oracle for the nonlinear terms") {
    // p = sin x, q = cos x, eps = 0.1 on [0, 2pi):
    //   d/dx (p q)      = d/dx (sin x cos x) = cos 2x
    //   -eps d/dx (q^2) = -0.1 d/dx cos^2 x  = 0.1 sin 2x
    // Mode 2 is far inside the dealias cutoff, so the discrete result
    // should match to roundoff.
    Grid g = tu::grid1(64);
    State s = make_state(g, ModelTag::diffusive, 0.1);
    s.p_tilde = tu::make_scalar(g, [](const std::array<double, 3>& x) { return std::sin(x[0]); });
    s.q.comp[0] =
        tu::make_scalar(g, [](const std::array<double, 3>& x) { return std::cos(x[0]); });

    auto [dp, dq] = nonlinear_rhs_conservation(s);
    ScalarField dp_exact =
        tu::make_scalar(g, [](const std::array<double, 3>& x) { return std::cos(2.0 * x[0]); });
    ScalarField dq_exact = tu::make_scalar(
        g, [](const std::array<double, 3>& x) { return 0.1 * std::sin(2.0 * x[0]); });
    CHECK(tu::max_abs_diff(dp.v, dp_exact.v) < 1e-12);
    CHECK(tu::max_abs_diff(dq.comp[0].v, dq_exact.v) < 1e-12);
}

TEST_CASE("density term is conservative: exact zero mean") {
    Grid g = tu::grid2(32, 32);
    State s = make_state(g, ModelTag::diffusive, 0.05);
    s.p_tilde = tu::random_scalar(g, 11);
    for (int a = 0; a < 2; ++a) s.q.comp[a] = tu::random_scalar(g, 12 + a);

    auto [dp, dq] = nonlinear_rhs_conservation(s);
    // the spectral mean mode of a divergence is identically zero; only
    // transform roundoff survives in physical space
    CHECK(std::abs(mass(dp)) < 1e-13);
}

TEST_CASE("momentum term is a gradient: curl-free to roundoff") {
    Grid g = tu::grid2(32, 32);
    State s = make_state(g, ModelTag::diffusive, 0.4);
    // q = grad(sin x cos y), deliberately curl-free like the model state
    s.q.comp[0] = tu::make_scalar(
        g, [](const std::array<double, 3>& x) { return std::cos(x[0]) * std::cos(x[1]); });
    s.q.comp[1] = tu::make_scalar(
        g, [](const std::array<double, 3>& x) { return -std::sin(x[0]) * std::sin(x[1]); });
    s.p_tilde = tu::random_scalar(g, 5);

    auto [dp, dq] = nonlinear_rhs_conservation(s);
    SpectralVector dqh = forward(dq);
    double curl_norm = spectral_l2(curl(dqh));
    double scale = norm_l2(dq);
    CHECK(curl_norm <= 1e-12 * (1.0 + scale));
}

TEST_CASE("momentum term is exactly zero without momentum diffusion") {
    Grid g = tu::grid2(16, 16);
    State s = make_state(g, ModelTag::nondiffusive, 0.0);
    s.p_tilde = tu::random_scalar(g, 3);
    for (int a = 0; a < 2; ++a) s.q.comp[a] = tu::random_scalar(g, 4 + a);

    auto [dp, dq] = nonlinear_rhs_conservation(s);
    for (int a = 0; a < 2; ++a)
        for (double v : dq.comp[a].v) CHECK(v == 0.0);
}

TEST_CASE("nonlinear evaluation rejects bad states") {
    Grid g = tu::grid1(16);
    SUBCASE("keller-segel tag is not a conservation state") {
        State s = make_state(g, ModelTag::keller_segel, 0.1);
        CHECK_THROWS_AS(nonlinear_rhs_conservation(s), config_error);
    }
    SUBCASE("mismatched grids") {
        Grid h = tu::grid1(32);
        State s;
        s.time = 0.0;
        s.p_tilde = ScalarField(g);
        s.q = VectorField(h);
        s.params.epsilon = 0.0;
        s.model = ModelTag::nondiffusive;
        CHECK_THROWS_AS(nonlinear_rhs_conservation(s), structure_error);
    }
    SUBCASE("non-finite data reports blowup with a timestamp") {
        State s = make_state(g, ModelTag::nondiffusive, 0.0);
        s.time = 2.5;
        s.p_tilde.v[7] = std::nan("");
        try {
            nonlinear_rhs_conservation(s);
            CHECK(false);
        } catch (const blowup_error& e) {
            CHECK(e.time == 2.5);
        }
    }
}

TEST_CASE("linearization blocks") {
    ModelParams par;
    par.d = 1.0;
    par.epsilon = 0.0;

    SUBCASE("zero mode carries no linear dynamics") {
        LinearBlock b = linear_block({0.0, 0.0, 0.0}, par);
        CHECK(b.m00 == std::complex<double>(0.0, 0.0));
        CHECK(b.m01 == std::complex<double>(0.0, 0.0));
        CHECK(b.m10 == std::complex<double>(0.0, 0.0));
        CHECK(b.m11 == std::complex<double>(0.0, 0.0));
        CHECK(b.transverse_rate == 0.0);
    }
    SUBCASE("unit wavenumber entries") {
        LinearBlock b = linear_block({1.0, 0.0, 0.0}, par);
        CHECK(b.m00 == std::complex<double>(-1.0, 0.0));
        CHECK(b.m01 == std::complex<double>(0.0, 1.0));
        CHECK(b.m10 == std::complex<double>(0.0, 1.0));
        CHECK(b.m11 == std::complex<double>(0.0, 0.0));
        CHECK(b.transverse_rate == 0.0);
    }
    SUBCASE("mixed wavenumber uses the modulus") {
        par.epsilon = 0.5;
        LinearBlock b = linear_block({3.0, 4.0, 0.0}, par);
        CHECK(b.m00.real() == doctest::Approx(-25.0).epsilon(1e-15));
        CHECK(b.m01.imag() == doctest::Approx(5.0).epsilon(1e-15));
        CHECK(b.m11.real() == doctest::Approx(-12.5).epsilon(1e-15));
        CHECK(b.transverse_rate == doctest::Approx(-12.5).epsilon(1e-15));
    }
    SUBCASE("spectrum never amplifies") {
        // closed form eigenvalues of [[-d k2, i k],[i k, -eps k2]]
        for (double kn : {0.5, 1.0, 2.0, 7.0, 30.0})
            for (double d : {0.2, 1.0, 3.0})
                for (double eps : {0.0, 0.01, 1.0}) {
                    ModelParams q;
                    q.d = d;
                    q.epsilon = eps;
                    LinearBlock b = linear_block({kn, 0.0, 0.0}, q);
                    std::complex<double> tr = b.m00 + b.m11;
                    std::complex<double> det = b.m00 * b.m11 - b.m01 * b.m10;
                    std::complex<double> disc = std::sqrt(tr * tr - 4.0 * det);
                    CHECK(((tr + disc) / 2.0).real() <= 1e-12);
                    CHECK(((tr - disc) / 2.0).real() <= 1e-12);
                    CHECK(b.transverse_rate <= 0.0);
                }
    }
}

TEST_CASE("keller-segel right hand side against closed forms") {
    Grid g = tu::grid1(128);
    KSState s;
    s.time = 0.0;
    s.params.d = 0.9;
    s.params.epsilon = 0.05;
    s.params.chi = 1.3;
    s.params.alpha = 0.7;

    SUBCASE("constant state only consumes") {
        s.u = tu::make_scalar(g, [](const std::array<double, 3>&) { return 2.0; });
        s.c = tu::make_scalar(g, [](const std::array<double, 3>&) { return 5.0; });
        auto [du, dc] = ks_rhs(s);
        for (double v : du.v) CHECK(std::abs(v) < 1e-13);
        for (double v : dc.v)
            CHECK(v == doctest::Approx(-0.7 * 2.0 * 5.0).epsilon(1e-13));
    }
    SUBCASE("constant density over a modulated signal") {
        // u = u0, c = exp(0.3 cos x):
        //   du = -chi u0 lap(ln c)          = 0.3 chi u0 cos x
        //   dc = eps lap(c) - alpha u0 c
        //      = c (eps (0.09 sin^2 x - 0.3 cos x) - alpha u0)
        const double u0 = 2.0;
        s.u = tu::make_scalar(g, [&](const std::array<double, 3>&) { return u0; });
        s.c = tu::make_scalar(
            g, [](const std::array<double, 3>& x) { return std::exp(0.3 * std::cos(x[0])); });
        auto [du, dc] = ks_rhs(s);
        ScalarField du_exact = tu::make_scalar(g, [&](const std::array<double, 3>& x) {
            return 0.3 * 1.3 * u0 * std::cos(x[0]);
        });
        ScalarField dc_exact = tu::make_scalar(g, [&](const std::array<double, 3>& x) {
            double cx = std::exp(0.3 * std::cos(x[0]));
            double lap = cx * (0.09 * std::sin(x[0]) * std::sin(x[0]) -
                               0.3 * std::cos(x[0]));
            return 0.05 * lap - 0.7 * u0 * cx;
        });
        CHECK(tu::max_abs_diff(du.v, du_exact.v) < 1e-10);
        CHECK(tu::max_abs_diff(dc.v, dc_exact.v) < 1e-10);
    }
    SUBCASE("concentration below the floor is rejected") {
        s.time = 1.75;
        s.u = tu::make_scalar(g, [](const std::array<double, 3>&) { return 1.0; });
        s.c = tu::make_scalar(g, [](const std::array<double, 3>&) { return 1e-9; });
        try {
            ks_rhs(s);
            CHECK(false);
        } catch (const positivity_error& e) {
            CHECK(e.time == 1.75);
        }
    }
}
