#include "chemflow/init_data.hpp"

#include <cmath>
#include <string>

#include "chemflow/diagnostics.hpp"
#include "chemflow/errors.hpp"
#include "chemflow/spectral.hpp"

namespace chemflow {

std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

double rng_uniform(std::uint64_t seed, std::uint64_t counter) {
    const std::uint64_t h = mix64(seed + 0x9E3779B97F4A7C15ull);
    const std::uint64_t v = mix64(h ^ mix64(counter + 0xD1B54A32D192ED03ull));
    return double(v >> 11) * 0x1.0p-53;
}

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

// counter layout: signed 16-bit mode indices in bits 0..47 (internal axis
// order), draw index in bits 48..55, field id in bits 56..63.
std::uint64_t mode_counter(const std::array<int, 3>& m, int draw, int field) {
    auto pack = [](int x) {
        return std::uint64_t(std::uint16_t(std::int16_t(x)));
    };
    return pack(m[0]) | (pack(m[1]) << 16) | (pack(m[2]) << 32) |
           (std::uint64_t(draw) << 48) | (std::uint64_t(field) << 56);
}

double gaussian(std::uint64_t seed, const std::array<int, 3>& m, int pair,
                int field) {
    const double u0 = rng_uniform(seed, mode_counter(m, 2 * pair, field));
    const double u1 = rng_uniform(seed, mode_counter(m, 2 * pair + 1, field));
    return std::sqrt(-2.0 * std::log(1.0 - u0)) * std::cos(two_pi * u1);
}

// Fill the stored r2c entries for the conjugate pair (+m, -m).
void set_mode(SpectralScalar& F, const Grid& g, const std::array<int, 3>& m,
              std::complex<double> z) {
    const int nzc = g.nz_spec();
    for (int sgn : {+1, -1}) {
        const std::array<int, 3> mm{sgn * m[0], sgn * m[1], sgn * m[2]};
        if (mm[2] < 0) continue; // conjugate plane not stored
        const int i0 = (mm[0] + g.n[0]) % g.n[0];
        const int i1 = (mm[1] + g.n[1]) % g.n[1];
        const long s = (long(i0) * g.n[1] + i1) * nzc + mm[2];
        F.c[s] = sgn > 0 ? z : std::conj(z);
    }
}

// Band-limited zero-mean random spectrum for one field id.
SpectralScalar random_spectrum(const Grid& g, std::uint64_t seed, int band,
                               int field) {
    SpectralScalar F(g);
    std::array<int, 3> lim{0, 0, 0};
    for (int a = 0; a < 3; ++a)
        if (g.n[a] > 1) lim[a] = band;
    for (int m0 = -lim[0]; m0 <= lim[0]; ++m0) {
        for (int m1 = -lim[1]; m1 <= lim[1]; ++m1) {
            for (int m2 = -lim[2]; m2 <= lim[2]; ++m2) {
                if (m0 == 0 && m1 == 0 && m2 == 0) continue;
                // one representative per conjugate pair: first nonzero > 0
                const int lead = (m0 != 0) ? m0 : (m1 != 0 ? m1 : m2);
                if (lead < 0) continue;
                const std::array<int, 3> m{m0, m1, m2};
                const std::complex<double> z(gaussian(seed, m, 0, field),
                                             gaussian(seed, m, 1, field));
                set_mode(F, g, m, z);
            }
        }
    }
    return F;
}

} // namespace

State gen_init(const Grid& g, const InitSpec& spec, const ModelParams& params,
               ModelTag model) {
    if (model == ModelTag::keller_segel)
        throw config_error("gen_init produces conservation-model states");
    params.validate(model);
    if (spec.band_limit < 1)
        throw config_error("band_limit must be >= 1");
    if (spec.band_limit > g.dealias_cutoff())
        throw config_error("band_limit " + std::to_string(spec.band_limit) +
                           " exceeds the dealias cutoff " +
                           std::to_string(g.dealias_cutoff()));
    if (!(spec.amplitude >= 0.0) || !std::isfinite(spec.amplitude))
        throw config_error("amplitude must be nonnegative and finite");

    State s;
    s.time = 0.0;
    s.params = params;
    s.model = model;
    s.p_tilde = ScalarField(g);
    s.q = VectorField(g);
    if (spec.amplitude == 0.0) return s;

    SpectralScalar ph = random_spectrum(g, spec.seed, spec.band_limit, 0);
    const double pn = spectral_l2(ph);
    if (pn > 0.0) {
        const double scale = spec.amplitude / pn;
        for (auto& z : ph.c) z *= scale;
    }
    s.p_tilde = inverse(ph);

    SpectralScalar phi = random_spectrum(g, spec.seed, spec.band_limit, 1);
    SpectralVector qh = gradient(phi);
    const double qn = spectral_l2(qh);
    if (qn > 0.0) {
        const double scale = spec.amplitude / qn;
        for (int a = 0; a < g.dim; ++a)
            for (auto& z : qh.comp[a].c) z *= scale;
    }
    s.q = inverse(qh);
    return s;
}

} // namespace chemflow
