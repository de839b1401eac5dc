#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "chemflow/config.hpp"
#include "chemflow/errors.hpp"
#include "chemflow/init_data.hpp"
#include "chemflow/integrator.hpp"
#include "chemflow/spectral.hpp"
#include "chemflow/sweep.hpp"
#include "test_util.hpp"

using namespace chemflow;

namespace {

// Two-pass centered least squares on (log eps, log err), kept deliberately
// different in structure from the production normal-equations path.
RateFit centered_fit(const std::vector<double>& eps,
                     const std::vector<double>& errs) {
    const std::size_t n = eps.size();
    long double xbar = 0.0L, ybar = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        xbar += std::log((long double)eps[i]);
        ybar += std::log((long double)errs[i]);
    }
    xbar /= n;
    ybar /= n;
    long double sxx = 0.0L, sxy = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        long double dx = std::log((long double)eps[i]) - xbar;
        long double dy = std::log((long double)errs[i]) - ybar;
        sxx += dx * dx;
        sxy += dx * dy;
    }
    RateFit f;
    f.slope = double(sxy / sxx);
    f.intercept = double(ybar - (sxy / sxx) * xbar);
    return f;
}

RunConfig tiny_sweep_config() {
    RunConfig cfg;
    cfg.grid.dim = 1;
    cfg.grid.sizes = {64};
    cfg.grid.extents = {tu::two_pi};
    cfg.params.d = 1.0;
    cfg.params.epsilon = 0.0; // ladder supplies it
    cfg.params.p_infinity = 1.0;
    cfg.init.seed = 42;
    cfg.init.amplitude = 0.05;
    cfg.init.band_limit = 4;
    cfg.schedule.dt = 0.01;
    cfg.schedule.t_end = 0.2;
    cfg.schedule.stride = 1;
    cfg.sweep.present = true;
    cfg.sweep.eps_ladder = {1e-2, 2e-2, 4e-2}; // deliberately unsorted
    cfg.sweep.comparison_times = {0.2, 0.1};   // deliberately unsorted
    cfg.sweep.norms = {"l2", "h2", "linf"};
    cfg.sweep.workers = 1;
    return cfg;
}

bool rows_identical(const std::vector<ErrorRow>& a,
                    const std::vector<ErrorRow>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].eps != b[i].eps || a[i].t != b[i].t) return false;
        if (a[i].l2_theta != b[i].l2_theta || a[i].l2_psi != b[i].l2_psi)
            return false;
        if (a[i].h1_theta != b[i].h1_theta || a[i].h1_psi != b[i].h1_psi)
            return false;
        if (a[i].h2_theta != b[i].h2_theta || a[i].h2_psi != b[i].h2_psi)
            return false;
        if (a[i].linf_theta != b[i].linf_theta ||
            a[i].linf_psi != b[i].linf_psi)
            return false;
    }
    return true;
}

} // namespace

TEST_CASE("rate fit recovers exact power laws") {
    std::vector<double> eps = {1e-1, 1e-2, 1e-3, 1e-4};

    SUBCASE("slope one") {
        RateFit f = fit_rate(eps, eps);
        CHECK(std::abs(f.slope - 1.0) < 1e-12);
        CHECK(std::abs(f.intercept) < 1e-12);
        CHECK(std::abs(f.r2 - 1.0) < 1e-12);
    }
    SUBCASE("slope one half") {
        std::vector<double> errs;
        for (double e : eps) errs.push_back(std::sqrt(e));
        RateFit f = fit_rate(eps, errs);
        CHECK(std::abs(f.slope - 0.5) < 1e-12);
        CHECK(std::abs(f.r2 - 1.0) < 1e-12);
    }
    SUBCASE("perturbed power law, against an independent fit") {
        std::vector<double> errs;
        double sign = 1.0;
        for (double e : eps) {
            errs.push_back(3.0 * std::pow(e, 0.7) * (1.0 + sign * 1e-3));
            sign = -sign;
        }
        RateFit f = fit_rate(eps, errs);
        CHECK(std::abs(f.slope - 0.7) < 0.01);
        CHECK(std::abs(f.intercept - std::log(3.0)) < 0.02);
        CHECK(f.r2 > 0.9999);

        RateFit g = centered_fit(eps, errs);
        CHECK(std::abs(f.slope - g.slope) < 1e-12);
        CHECK(std::abs(f.intercept - g.intercept) < 1e-12);
    }
}

TEST_CASE("rate fit refuses degenerate input") {
    CHECK_THROWS_AS(fit_rate({1e-1, 1e-2}, {1.0, 0.5}), config_error);
    CHECK_THROWS_AS(fit_rate({1e-1, 1e-2, 1e-3}, {1.0, 0.0, 0.1}),
                    config_error);
    CHECK_THROWS_AS(fit_rate({1e-1, -1e-2, 1e-3}, {1.0, 0.5, 0.1}),
                    config_error);
    CHECK_THROWS_AS(fit_rate({1e-2, 1e-2, 1e-2}, {1.0, 0.5, 0.1}),
                    config_error);
    CHECK_THROWS_AS(fit_rate({1e-1, 1e-2, 1e-3}, {1.0, 0.5}), config_error);
}

TEST_CASE("vanishing-diffusion sweep on a small 1d problem") {
    RunConfig cfg = tiny_sweep_config();
    SweepResult res = run_sweep(cfg);

    // ladder sorted descending, times ascending
    REQUIRE(res.ladder.size() == 3);
    CHECK(res.ladder[0] == 0.04);
    CHECK(res.ladder[1] == 0.02);
    CHECK(res.ladder[2] == 0.01);
    REQUIRE(res.comparison_times.size() == 2);
    CHECK(res.comparison_times[0] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(res.comparison_times[1] == doctest::Approx(0.2).epsilon(1e-12));

    // rows ladder-major, time-minor
    REQUIRE(res.rows.size() == 6);
    for (int m = 0; m < 3; ++m) {
        for (int j = 0; j < 2; ++j) {
            const ErrorRow& r = res.rows[2 * m + j];
            CHECK(r.eps == res.ladder[m]);
            CHECK(r.t == doctest::Approx(res.comparison_times[j]).epsilon(1e-12));
            CHECK(r.l2_theta > 0.0);
            CHECK(r.l2_psi > 0.0);
            CHECK(r.h1_theta > 0.0);
            CHECK(r.h2_theta > 0.0);
            CHECK(r.linf_theta > 0.0);
            CHECK(r.linf_psi > 0.0);
        }
    }

    // fits in configured norm order
    REQUIRE(res.norms.size() == 3);
    CHECK(res.norms[0] == "l2");
    CHECK(res.norms[1] == "h2");
    CHECK(res.norms[2] == "linf");
    REQUIRE(res.fits.size() == 3);
    CHECK_FALSE(res.fit_refused);
    for (const RateRow& f : res.fits) {
        INFO("norm ", f.norm, " slope ", f.slope, " r2 ", f.r2);
        CHECK(f.slope > 0.3);
        CHECK(f.slope < 1.2);
        CHECK(f.r2 > 0.9);
    }

    // sup errors cover all four norms regardless of the fitted subset
    REQUIRE(res.sup_errors.size() == 4);
    for (const char* n : {"l2", "h1", "h2", "linf"}) {
        auto it = res.sup_errors.find(n);
        REQUIRE(it != res.sup_errors.end());
        REQUIRE(it->second.size() == 3);
        for (double v : it->second) CHECK(v > 0.0);
    }

    // smaller eps means closer to the baseline
    CHECK(res.monotone);
    CHECK(res.h2_uniformity_spread >= 1.0);
    CHECK(res.h2_uniformity_spread < 4.0);

    // full time series kept for the baseline and each member
    CHECK(res.baseline_record.size() == 21);
    REQUIRE(res.member_records.size() == 3);
    for (const auto& rec : res.member_records) CHECK(rec.size() == 21);

    SUBCASE("rerun is bitwise identical") {
        SweepResult res2 = run_sweep(cfg);
        CHECK(rows_identical(res.rows, res2.rows));
        REQUIRE(res2.fits.size() == res.fits.size());
        for (std::size_t i = 0; i < res.fits.size(); ++i) {
            CHECK(res.fits[i].slope == res2.fits[i].slope);
            CHECK(res.fits[i].intercept == res2.fits[i].intercept);
            CHECK(res.fits[i].r2 == res2.fits[i].r2);
        }
    }

    SUBCASE("two workers give the same rows as one") {
        RunConfig cfg2 = tiny_sweep_config();
        cfg2.sweep.workers = 2;
        SweepResult res2 = run_sweep(cfg2);
        CHECK(rows_identical(res.rows, res2.rows));
    }
}

TEST_CASE("sweep rejects ill-formed requests") {
    SUBCASE("epsilon must come from the ladder") {
        RunConfig cfg = tiny_sweep_config();
        cfg.params.epsilon = 0.01;
        CHECK_THROWS_AS(run_sweep(cfg), config_error);
    }
    SUBCASE("missing sweep section") {
        RunConfig cfg = tiny_sweep_config();
        cfg.sweep.present = false;
        CHECK_THROWS_AS(run_sweep(cfg), config_error);
    }
    SUBCASE("duplicate ladder entry") {
        RunConfig cfg = tiny_sweep_config();
        cfg.sweep.eps_ladder = {2e-2, 2e-2, 1e-2};
        CHECK_THROWS_AS(run_sweep(cfg), config_error);
    }
    SUBCASE("non-positive ladder entry") {
        RunConfig cfg = tiny_sweep_config();
        cfg.sweep.eps_ladder = {2e-2, -1e-2};
        CHECK_THROWS_AS(run_sweep(cfg), config_error);
    }
    SUBCASE("comparison time off the step grid") {
        RunConfig cfg = tiny_sweep_config();
        cfg.sweep.comparison_times = {0.103};
        CHECK_THROWS_AS(run_sweep(cfg), config_error);
    }
    SUBCASE("comparison time skipped by the stride") {
        RunConfig cfg = tiny_sweep_config();
        cfg.schedule.stride = 2;
        cfg.sweep.comparison_times = {0.15};
        CHECK_THROWS_AS(run_sweep(cfg), config_error);
    }
}

TEST_CASE("linearized sweep matches the per-mode propagator") {
    // Band-1 data on a 2*pi box has a single Hermitian mode pair, so the
    // whole linearized evolution is one 2x2 recursion per epsilon.
    RunConfig cfg;
    cfg.grid.dim = 1;
    cfg.grid.sizes = {32};
    cfg.grid.extents = {tu::two_pi};
    cfg.params.d = 1.0;
    cfg.params.epsilon = 0.0;
    cfg.params.p_infinity = 1.0;
    cfg.init.seed = 7;
    cfg.init.amplitude = 0.01;
    cfg.init.band_limit = 1;
    cfg.schedule.dt = 0.01;
    cfg.schedule.t_end = 0.1;
    cfg.schedule.stride = 1;
    cfg.sweep.present = true;
    cfg.sweep.eps_ladder = {4e-2, 2e-2, 1e-2};
    cfg.sweep.comparison_times = {0.1};
    cfg.sweep.norms = {"l2"};
    cfg.sweep.workers = 1;

    SweepOptions opts;
    opts.linearized = true;
    SweepResult res = run_sweep(cfg, opts);
    REQUIRE(res.rows.size() == 3);

    Grid g = grid_from_spec(cfg.grid);
    ModelParams base = cfg.params;
    State init = gen_init(g, cfg.init, base, ModelTag::nondiffusive);
    SpectralScalar ph = forward(init.p_tilde);
    SpectralVector qh = forward(init.q);
    const std::complex<double> p0 = ph.c[1];
    const std::complex<double> l0 = qh.comp[0].c[1]; // longitudinal, k = +1

    auto march = [&](double eps) {
        ModelParams p = base;
        p.epsilon = eps;
        PropagatorTable::ModeOp op =
            mode_exponential({0.0, 0.0, 1.0}, p, cfg.schedule.dt);
        std::complex<double> a = p0, b = l0;
        for (int i = 0; i < 10; ++i) {
            std::complex<double> an = op.m00 * a + op.m01 * b;
            std::complex<double> bn = op.m10 * a + op.m11 * b;
            a = an;
            b = bn;
        }
        return std::make_pair(a, b);
    };

    auto baseline = march(0.0);
    const double vol = tu::two_pi;
    const double npts = 32.0;
    for (int m = 0; m < 3; ++m) {
        auto member = march(res.ladder[m]);
        double expect_theta =
            std::sqrt(2.0 * vol) * std::abs(member.first - baseline.first) / npts;
        double expect_psi =
            std::sqrt(2.0 * vol) * std::abs(member.second - baseline.second) / npts;
        INFO("eps ", res.ladder[m]);
        CHECK(res.rows[m].l2_theta ==
              doctest::Approx(expect_theta).epsilon(1e-10));
        CHECK(res.rows[m].l2_psi == doctest::Approx(expect_psi).epsilon(1e-10));
    }
}

TEST_CASE("self-convergence study") {
    RunConfig cfg;
    cfg.grid.dim = 1;
    cfg.grid.sizes = {64};
    cfg.grid.extents = {tu::two_pi};
    cfg.params.d = 1.0;
    cfg.params.epsilon = 0.0;
    cfg.params.p_infinity = 1.0;
    cfg.init.seed = 9;
    cfg.init.amplitude = 0.2;
    cfg.init.band_limit = 4;
    cfg.schedule.dt = 0.02;
    cfg.schedule.t_end = 0.2;
    cfg.schedule.stride = 1;

    SUBCASE("temporal orders sit at four") {
        SelfConvergenceReport rep = self_convergence(cfg);
        REQUIRE(rep.temporal_errors.size() == 3);
        CHECK(rep.temporal_errors[0] > rep.temporal_errors[1]);
        CHECK(rep.temporal_errors[1] > rep.temporal_errors[2]);
        REQUIRE(rep.temporal_orders.size() == 2);
        for (double p : rep.temporal_orders) {
            INFO("observed order ", p);
            CHECK(p > 3.7);
            CHECK(p < 4.6);
        }
        CHECK(rep.spatial_compared);
        INFO("spatial error ", rep.spatial_error);
        CHECK(rep.spatial_error < 1e-4);
        CHECK(rep.warnings.empty());
    }

    SUBCASE("linearized study is spectrally resolved") {
        SelfConvergenceOptions o;
        o.linearized = true;
        SelfConvergenceReport rep = self_convergence(cfg, o);
        CHECK(rep.spatial_compared);
        CHECK(rep.spectrally_resolved);
    }

    SUBCASE("small diffusive data is spectrally resolved nonlinearly") {
        RunConfig small = cfg;
        small.params.epsilon = 0.01;
        small.init.amplitude = 0.02;
        small.init.band_limit = 2;
        SelfConvergenceReport rep = self_convergence(small);
        CHECK(rep.spatial_compared);
        INFO("spatial error ", rep.spatial_error);
        CHECK(rep.spectrally_resolved);
    }

    SUBCASE("unresolved band is reported, not fatal") {
        RunConfig wide = cfg;
        wide.init.band_limit = 30; // beyond the n=64 dealias cutoff of 21
        SelfConvergenceReport rep = self_convergence(wide);
        CHECK_FALSE(rep.spatial_compared);
        CHECK_FALSE(rep.spectrally_resolved);
        CHECK(rep.temporal_errors.empty());
        REQUIRE_FALSE(rep.warnings.empty());
    }
}
