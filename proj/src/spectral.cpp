#include "chemflow/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include "chemflow/errors.hpp"

namespace chemflow {

namespace {

// One r2c/c2r plan pair per grid shape, built lazily behind a mutex.  Plan
// creation is not thread-safe in FFTW, execution through the new-array
// interface is, so concurrent sweep workers can share the cached plans.
struct PlanPair {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
};

std::mutex plan_mutex;
std::map<std::array<int, 3>, PlanPair>& plan_cache() {
    static std::map<std::array<int, 3>, PlanPair> cache;
    return cache;
}

PlanPair plans_for(const Grid& g) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto& cache = plan_cache();
    auto it = cache.find(g.n);
    if (it != cache.end()) return it->second;

    // Leading singleton axes do not change the memory layout, so plan with
    // the active rank only.  FFTW_ESTIMATE keeps planning deterministic and
    // leaves the scratch arrays untouched afterwards; FFTW_UNALIGNED lets us
    // execute on plain std::vector storage.
    const int rank = g.dim;
    std::array<int, 3> na{};
    for (int a = 0; a < rank; ++a) na[a] = g.n[a + 3 - rank];

    std::vector<double> scratch_real(g.points());
    std::vector<std::complex<double>> scratch_spec(g.spectral_size());
    auto* cplx = reinterpret_cast<fftw_complex*>(scratch_spec.data());

    PlanPair p;
    p.r2c = fftw_plan_dft_r2c(rank, na.data(), scratch_real.data(), cplx,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.c2r = fftw_plan_dft_c2r(rank, na.data(), cplx, scratch_real.data(),
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p.r2c || !p.c2r)
        throw numerical_error("FFTW plan creation failed for grid " +
                              std::to_string(na[0]) + "x" + std::to_string(na[1]) +
                              "x" + std::to_string(na[2]));
    cache[g.n] = p;
    return p;
}

const Grid& require_grid(const ScalarField& f) {
    if (!f.grid) throw structure_error("scalar field has no grid attached");
    return *f.grid;
}

const Grid& require_grid(const SpectralScalar& F) {
    if (!F.grid) throw structure_error("spectral field has no grid attached");
    return *F.grid;
}

} // namespace

SpectralScalar forward(const ScalarField& f) {
    const Grid& g = require_grid(f);
    PlanPair p = plans_for(g);
    SpectralScalar F(g);
    // Out-of-place r2c preserves its input, so the const_cast is safe.
    fftw_execute_dft_r2c(p.r2c, const_cast<double*>(f.v.data()),
                         reinterpret_cast<fftw_complex*>(F.c.data()));
    return F;
}

ScalarField inverse(const SpectralScalar& F) {
    const Grid& g = require_grid(F);
    PlanPair p = plans_for(g);
    ScalarField f(g);
    // c2r destroys its input for rank > 1, so transform a copy.
    std::vector<std::complex<double>> in(F.c);
    fftw_execute_dft_c2r(p.c2r, reinterpret_cast<fftw_complex*>(in.data()),
                         f.v.data());
    const double ninv = 1.0 / double(g.points());
    for (double& x : f.v) x *= ninv;
    return f;
}

SpectralVector forward(const VectorField& f) {
    if (!f.grid) throw structure_error("vector field has no grid attached");
    SpectralVector F(*f.grid);
    for (int a = 0; a < f.grid->dim; ++a) F.comp[a] = forward(f.comp[a]);
    return F;
}

VectorField inverse(const SpectralVector& F) {
    if (!F.grid) throw structure_error("spectral vector has no grid attached");
    VectorField f(*F.grid);
    for (int a = 0; a < F.grid->dim; ++a) f.comp[a] = inverse(F.comp[a]);
    return f;
}

namespace {

// Visit every stored mode with its padded-axis wavenumbers.
template <class Fn>
void for_each_mode(const Grid& g, Fn&& fn) {
    const int nzc = g.nz_spec();
    long s = 0;
    for (int i0 = 0; i0 < g.n[0]; ++i0) {
        const double k0 = g.wavenumber[0][i0];
        for (int i1 = 0; i1 < g.n[1]; ++i1) {
            const double k1 = g.wavenumber[1][i1];
            for (int i2 = 0; i2 < nzc; ++i2, ++s) {
                fn(s, k0, k1, g.wavenumber[2][i2]);
            }
        }
    }
}

} // namespace

SpectralVector gradient(const SpectralScalar& F) {
    const Grid& g = require_grid(F);
    SpectralVector G(g);
    const std::complex<double> iu(0.0, 1.0);
    for_each_mode(g, [&](long s, double k0, double k1, double k2) {
        const std::complex<double> val = F.c[s];
        const std::array<double, 3> k{k0, k1, k2};
        for (int a = 0; a < g.dim; ++a)
            G.comp[a].c[s] = iu * k[a + 3 - g.dim] * val;
    });
    return G;
}

SpectralScalar divergence(const SpectralVector& F) {
    if (!F.grid) throw structure_error("spectral vector has no grid attached");
    const Grid& g = *F.grid;
    SpectralScalar D(g);
    const std::complex<double> iu(0.0, 1.0);
    for_each_mode(g, [&](long s, double k0, double k1, double k2) {
        const std::array<double, 3> k{k0, k1, k2};
        std::complex<double> acc(0.0, 0.0);
        for (int a = 0; a < g.dim; ++a)
            acc += iu * k[a + 3 - g.dim] * F.comp[a].c[s];
        D.c[s] = acc;
    });
    return D;
}

SpectralScalar laplacian(const SpectralScalar& F) {
    const Grid& g = require_grid(F);
    SpectralScalar L(g);
    for_each_mode(g, [&](long s, double k0, double k1, double k2) {
        L.c[s] = -(k0 * k0 + k1 * k1 + k2 * k2) * F.c[s];
    });
    return L;
}

SpectralVector laplacian(const SpectralVector& F) {
    if (!F.grid) throw structure_error("spectral vector has no grid attached");
    SpectralVector L(*F.grid);
    for (int a = 0; a < F.grid->dim; ++a) L.comp[a] = laplacian(F.comp[a]);
    return L;
}

int curl_components(int dim) { return dim == 3 ? 3 : 1; }

SpectralVector curl(const SpectralVector& F) {
    if (!F.grid) throw structure_error("spectral vector has no grid attached");
    const Grid& g = *F.grid;
    SpectralVector C;
    C.grid = &g;
    C.comp.assign(curl_components(g.dim), SpectralScalar(g));
    const std::complex<double> iu(0.0, 1.0);
    if (g.dim == 1) {
        return C; // identically zero
    }
    if (g.dim == 2) {
        // scalar curl d(q1)/dx0 - d(q0)/dx1 with user axes (x0, x1)
        for_each_mode(g, [&](long s, double, double k1, double k2) {
            C.comp[0].c[s] = iu * (k1 * F.comp[1].c[s] - k2 * F.comp[0].c[s]);
        });
        return C;
    }
    for_each_mode(g, [&](long s, double k0, double k1, double k2) {
        C.comp[0].c[s] = iu * (k1 * F.comp[2].c[s] - k2 * F.comp[1].c[s]);
        C.comp[1].c[s] = iu * (k2 * F.comp[0].c[s] - k0 * F.comp[2].c[s]);
        C.comp[2].c[s] = iu * (k0 * F.comp[1].c[s] - k1 * F.comp[0].c[s]);
    });
    return C;
}

void dealias_in_place(SpectralScalar& F) {
    const Grid& g = require_grid(F);
    for (long s = 0; s < g.spectral_size(); ++s)
        if (!g.dealias_keep[s]) F.c[s] = 0.0;
}

void dealias_in_place(SpectralVector& F) {
    if (!F.grid) throw structure_error("spectral vector has no grid attached");
    for (auto& c : F.comp) dealias_in_place(c);
}

SpectralScalar dealias(const SpectralScalar& F) {
    SpectralScalar G = F;
    dealias_in_place(G);
    return G;
}

SpectralVector dealias(const SpectralVector& F) {
    SpectralVector G = F;
    dealias_in_place(G);
    return G;
}

namespace {

// Visit conjugate pairs inside the self-conjugate planes of the last axis
// (stored last-index 0 and n/2).  fn(s_lo, s_hi) with s_lo the entry whose
// value is authoritative; self-paired entries get fn(s, s).
template <class Fn>
void for_each_conjugate_pair(const Grid& g, Fn&& fn) {
    const int nzc = g.nz_spec();
    std::vector<int> planes{0};
    if (g.n[2] > 1) planes.push_back(g.n[2] / 2);
    for (int i2 : planes) {
        for (int i0 = 0; i0 < g.n[0]; ++i0) {
            const int j0 = (g.n[0] - i0) % g.n[0];
            for (int i1 = 0; i1 < g.n[1]; ++i1) {
                const int j1 = (g.n[1] - i1) % g.n[1];
                if (std::make_pair(i0, i1) > std::make_pair(j0, j1)) continue;
                const long s = (long(i0) * g.n[1] + i1) * nzc + i2;
                const long t = (long(j0) * g.n[1] + j1) * nzc + i2;
                fn(s, t);
            }
        }
    }
}

} // namespace

double hermitian_defect(const SpectralScalar& F) {
    const Grid& g = require_grid(F);
    double worst = 0.0;
    double scale = 0.0;
    for (const auto& z : F.c) scale = std::max(scale, std::abs(z));
    for_each_conjugate_pair(g, [&](long s, long t) {
        const std::complex<double> d =
            (s == t) ? std::complex<double>(0.0, F.c[s].imag())
                     : F.c[t] - std::conj(F.c[s]);
        worst = std::max(worst, std::abs(d));
    });
    return worst / (1.0 + scale);
}

void enforce_hermitian(SpectralScalar& F) {
    const Grid& g = require_grid(F);
    for_each_conjugate_pair(g, [&](long s, long t) {
        if (s == t)
            F.c[s] = std::complex<double>(F.c[s].real(), 0.0);
        else
            F.c[t] = std::conj(F.c[s]);
    });
}

} // namespace chemflow
