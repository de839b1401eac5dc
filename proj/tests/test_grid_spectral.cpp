#include <doctest.h>

#include <cmath>
#include <complex>

#include "chemflow/errors.hpp"
#include "chemflow/grid.hpp"
#include "chemflow/spectral.hpp"
#include "test_util.hpp"

using namespace chemflow;

TEST_CASE("wavenumbers are in fft storage order and scale with the box") {
    const Grid g = tu::grid1(8);
    const double want[8] = {0, 1, 2, 3, -4, -3, -2, -1};
    for (int m = 0; m < 8; ++m)
        CHECK(g.wavenumber[2][m] == doctest::Approx(want[m]).epsilon(1e-14));

    // doubling the box halves every wavenumber
    const Grid g2 = tu::grid1(8, 2.0 * tu::two_pi);
    for (int m = 0; m < 8; ++m)
        CHECK(g2.wavenumber[2][m] ==
              doctest::Approx(0.5 * want[m]).epsilon(1e-14));

    // leading singleton axes carry the single wavenumber 0
    CHECK(g.wavenumber[0].size() == 1);
    CHECK(g.wavenumber[0][0] == 0.0);
}

TEST_CASE("grid bookkeeping") {
    const Grid g = tu::grid2(16, 8, tu::two_pi, 1.0);
    CHECK(g.dim == 2);
    CHECK(g.size(0) == 16);
    CHECK(g.size(1) == 8);
    CHECK(g.points() == 128);
    CHECK(g.nz_spec() == 5);
    CHECK(g.spectral_size() == 16 * 5);
    CHECK(g.length(1) == 1.0);
    CHECK(g.spacing(1) == doctest::Approx(0.125));
    CHECK(g.min_spacing() == doctest::Approx(0.125));
    CHECK(g.volume() == doctest::Approx(tu::two_pi));
    CHECK(g.compatible(tu::grid2(16, 8, tu::two_pi, 1.0)));
    CHECK_FALSE(g.compatible(tu::grid2(16, 8)));
    CHECK_FALSE(g.compatible(tu::grid2(8, 16, tu::two_pi, 1.0)));
}

TEST_CASE("make_grid rejects malformed input") {
    CHECK_THROWS_AS(make_grid(0, {}, {}), config_error);
    CHECK_THROWS_AS(make_grid(4, {8, 8, 8, 8}, {1, 1, 1, 1}), config_error);
    CHECK_THROWS_AS(make_grid(1, {12}, {1.0}), config_error);
    CHECK_THROWS_AS(make_grid(1, {0}, {1.0}), config_error);
    CHECK_THROWS_AS(make_grid(1, {8}, {-1.0}), config_error);
    CHECK_THROWS_AS(make_grid(1, {8}, {0.0}), config_error);
    CHECK_THROWS_AS(make_grid(2, {8}, {1.0, 1.0}), config_error);
    CHECK_THROWS_AS(make_grid(2, {8, 8}, {1.0}), config_error);
}

TEST_CASE("dealias mask keeps |m| <= n/3 on every axis") {
    const Grid g = tu::grid2(16, 16);
    CHECK(g.dealias_cutoff() == 5);
    const int nzc = g.nz_spec();
    long s = 0;
    for (int i1 = 0; i1 < 16; ++i1) {
        const int m1 = i1 < 8 ? i1 : i1 - 16;
        for (int i2 = 0; i2 < nzc; ++i2, ++s) {
            // with a leading singleton axis, s runs over (i1, i2) directly
            const bool want = std::abs(m1) <= 5 && i2 <= 5;
            CHECK(int(g.dealias_keep[s]) == int(want));
        }
    }
    // mixed sizes: the cutoff is per axis
    const Grid ga = tu::grid2(32, 8);
    CHECK(ga.dealias_cutoff() == 2);
}

TEST_CASE("transform round trip is lossless to roundoff") {
    for (const Grid& g : {tu::grid1(32), tu::grid2(16, 8, tu::two_pi, 1.0),
                          tu::grid3(8)}) {
        const ScalarField f = tu::random_scalar(g, 11u + g.dim);
        const ScalarField back = inverse(forward(f));
        CHECK(tu::max_abs_diff(f.v, back.v) < 1e-13);
    }
}

TEST_CASE("forward leaves its input untouched") {
    const Grid g = tu::grid2(16, 16);
    const ScalarField f = tu::random_scalar(g, 3);
    const std::vector<double> copy = f.v;
    (void)forward(f);
    CHECK(f.v == copy);
}

TEST_CASE("cosine puts amplitude 1/2 on the stored mode") {
    const Grid g = tu::grid1(16);
    const ScalarField f = tu::make_scalar(
        g, [](const std::array<double, 3>& x) { return std::cos(x[0]); });
    const SpectralScalar F = forward(f);
    const double ninv = 1.0 / 16.0;
    for (int m = 0; m < g.nz_spec(); ++m) {
        const std::complex<double> c = F.c[m] * ninv;
        if (m == 1) {
            CHECK(c.real() == doctest::Approx(0.5).epsilon(1e-13));
            CHECK(std::abs(c.imag()) < 1e-13);
        } else {
            CHECK(std::abs(c) < 1e-13);
        }
    }
    // sine lands on the imaginary part with the sign of exp(-ikx)
    const ScalarField s = tu::make_scalar(
        g, [](const std::array<double, 3>& x) { return std::sin(x[0]); });
    const std::complex<double> c1 = forward(s).c[1] * ninv;
    CHECK(c1.imag() == doctest::Approx(-0.5).epsilon(1e-13));
    CHECK(std::abs(c1.real()) < 1e-13);
}

TEST_CASE("parseval: spectral sum equals the quadrature mean square") {
    for (const Grid& g : {tu::grid1(32, 3.0), tu::grid2(16, 8, tu::two_pi, 1.0),
                          tu::grid3(8)}) {
        const ScalarField f = tu::random_scalar(g, 17);
        double mean_sq = 0.0;
        for (double v : f.v) mean_sq += v * v;
        mean_sq /= double(g.points());

        const SpectralScalar F = forward(f);
        const double ninv = 1.0 / double(g.points());
        double spec = 0.0;
        long s = 0;
        for (int i0 = 0; i0 < g.n[0]; ++i0)
            for (int i1 = 0; i1 < g.n[1]; ++i1)
                for (int i2 = 0; i2 < g.nz_spec(); ++i2, ++s)
                    spec += hermitian_weight(g, i2) * std::norm(F.c[s] * ninv);
        CHECK(spec == doctest::Approx(mean_sq).epsilon(1e-12));
    }
}

TEST_CASE("gradient matches hand derivatives pointwise") {
    const Grid g = tu::grid2(32, 32);
    const ScalarField f =
        tu::make_scalar(g, [](const std::array<double, 3>& x) {
            return std::sin(x[0]) + std::cos(2.0 * x[1]);
        });
    const VectorField df = inverse(gradient(forward(f)));
    const ScalarField d0 = tu::make_scalar(
        g, [](const std::array<double, 3>& x) { return std::cos(x[0]); });
    const ScalarField d1 = tu::make_scalar(g, [](const std::array<double, 3>& x) {
        return -2.0 * std::sin(2.0 * x[1]);
    });
    CHECK(tu::max_abs_diff(df.comp[0].v, d0.v) < 1e-12);
    CHECK(tu::max_abs_diff(df.comp[1].v, d1.v) < 1e-12);
}

TEST_CASE("gradient respects a nonstandard box length") {
    const double L = 3.0;
    const Grid g = tu::grid1(64, L);
    const ScalarField f = tu::make_scalar(g, [&](const std::array<double, 3>& x) {
        return std::sin(tu::two_pi * x[0] / L);
    });
    const VectorField df = inverse(gradient(forward(f)));
    const ScalarField want = tu::make_scalar(g, [&](const std::array<double, 3>& x) {
        return (tu::two_pi / L) * std::cos(tu::two_pi * x[0] / L);
    });
    CHECK(tu::max_abs_diff(df.comp[0].v, want.v) < 1e-12);
}

TEST_CASE("divergence of a gradient equals the laplacian") {
    for (const Grid& g : {tu::grid2(16, 8, tu::two_pi, 1.0), tu::grid3(8)}) {
        const SpectralScalar F = forward(tu::random_scalar(g, 23));
        const SpectralScalar a = divergence(gradient(F));
        const SpectralScalar b = laplacian(F);
        double m = 0.0, scale = 0.0;
        for (long s = 0; s < g.spectral_size(); ++s) {
            m = std::max(m, std::abs(a.c[s] - b.c[s]));
            scale = std::max(scale, std::abs(b.c[s]));
        }
        CHECK(m <= 1e-12 * (1.0 + scale));
    }
}

TEST_CASE("curl of a gradient vanishes") {
    for (const Grid& g : {tu::grid2(16, 16), tu::grid3(8)}) {
        const SpectralScalar F = forward(tu::random_scalar(g, 5));
        const SpectralVector grad = gradient(F);
        const SpectralVector c = curl(grad);
        double gscale = 0.0;
        for (int a = 0; a < g.dim; ++a)
            for (const auto& z : grad.comp[a].c)
                gscale = std::max(gscale, std::abs(z));
        CHECK(int(c.comp.size()) == curl_components(g.dim));
        for (const auto& comp : c.comp)
            for (const auto& z : comp.c) CHECK(std::abs(z) <= 1e-12 * gscale);
    }
}

TEST_CASE("1d curl is identically zero by convention") {
    const Grid g = tu::grid1(16);
    const SpectralVector q = gradient(forward(tu::random_scalar(g, 1)));
    const SpectralVector c = curl(q);
    CHECK(curl_components(1) == 1);
    CHECK(c.comp.size() == 1);
    for (const auto& z : c.comp[0].c) CHECK(z == std::complex<double>(0.0, 0.0));
}

TEST_CASE("dealias zeroes exactly the dropped modes and is idempotent") {
    const Grid g = tu::grid2(16, 16);
    SpectralScalar F = forward(tu::random_scalar(g, 9));
    // make every coefficient nonzero so the mask is visible
    for (auto& z : F.c) z += std::complex<double>(1.0, 0.5);
    const SpectralScalar d1 = dealias(F);
    for (long s = 0; s < g.spectral_size(); ++s) {
        if (g.dealias_keep[s])
            CHECK(d1.c[s] == F.c[s]); // kept modes bit-identical
        else
            CHECK(d1.c[s] == std::complex<double>(0.0, 0.0));
    }
    const SpectralScalar d2 = dealias(d1);
    for (long s = 0; s < g.spectral_size(); ++s) CHECK(d2.c[s] == d1.c[s]);
}

TEST_CASE("hermitian defect is tiny for real data and repairable") {
    const Grid g = tu::grid2(16, 16);
    SpectralScalar F = forward(tu::random_scalar(g, 31));
    CHECK(hermitian_defect(F) < 1e-14);

    // corrupt a self-conjugate plane entry
    F.c[3 * g.nz_spec()] += std::complex<double>(0.0, 0.7);
    CHECK(hermitian_defect(F) > 1e-3);
    enforce_hermitian(F);
    CHECK(hermitian_defect(F) < 1e-14);
    // repaired coefficients describe a real field: round trip is consistent
    const ScalarField f = inverse(F);
    const SpectralScalar G = forward(f);
    double m = 0.0;
    for (long s = 0; s < g.spectral_size(); ++s)
        m = std::max(m, std::abs(F.c[s] - G.c[s]));
    CHECK(m < 1e-10 * double(g.points()));
}
