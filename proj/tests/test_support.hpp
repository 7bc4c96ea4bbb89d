#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

#include "sfpe/drift.hpp"
#include "sfpe/spectral_field.hpp"

namespace ts {

constexpr double kPi = 3.14159265358979323846264338327950288;

inline sfpe::Grid grid1(int n = 256, double length = 16.0 * kPi) {
    return sfpe::make_grid(1, n, length);
}

inline sfpe::Grid grid2(int n = 64, double length = 16.0 * kPi) {
    return sfpe::make_grid(2, n, length);
}

// amp * cos(2 pi k x / L + phase), d = 1.
inline sfpe::SpectralField cosine(const sfpe::Grid& g, int k, double amp = 1.0,
                                  double phase = 0.0) {
    sfpe::SpectralField f(g, 1);
    std::complex<double> half = 0.5 * amp * std::complex<double>(std::cos(phase), std::sin(phase));
    f.coef(0, static_cast<std::size_t>(g.axis_index(k))) = half;
    f.coef(0, static_cast<std::size_t>(g.axis_index(-k))) = std::conj(half);
    return f;
}

inline sfpe::SpectralField constant(const sfpe::Grid& g, double c) {
    sfpe::SpectralField f(g, 1);
    f.coef(0, 0) = c;
    return f;
}

// Random real band-limited field with slowly decaying spectrum.
inline sfpe::SpectralField random_field(const sfpe::Grid& g, std::uint64_t seed,
                                        double gamma = 0.5, std::uint64_t stream = 0) {
    return sfpe::sample_random_field(g, seed, gamma, 1.0, stream);
}

// Nonnegative random density-like field with prescribed mass.
inline sfpe::SpectralField random_nonneg(const sfpe::Grid& g, std::uint64_t seed, double mass,
                                         std::uint64_t stream = 0) {
    sfpe::SpectralField f = sfpe::sample_random_field(g, seed, 1.5, 1.0, stream);
    auto v = sfpe::to_physical(f);
    double mn = 0.0;
    for (double x : v) mn = std::min(mn, x);
    for (double& x : v) x += -mn + 1e-3;
    sfpe::SpectralField out = sfpe::from_physical(g, v);
    out *= mass / sfpe::integral(out);
    return out;
}

}  // namespace ts
