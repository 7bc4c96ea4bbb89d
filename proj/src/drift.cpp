#include "sfpe/drift.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sfpe/rng.hpp"

namespace sfpe {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

std::uint64_t zigzag(int k) {
    return k >= 0 ? 2ull * static_cast<std::uint64_t>(k)
                  : 2ull * static_cast<std::uint64_t>(-k) - 1ull;
}

// Canonical half-space representative: k0 > 0, or k0 == 0 and k1 > 0.
bool canonical(const int* kv, int dim) {
    if (kv[0] != 0) return kv[0] > 0;
    if (dim == 1) return false;
    return kv[1] > 0;
}

}  // namespace

void DriftSpec::validate() const {
    if (!(beta > 0.0 && beta < 0.5))
        throw std::invalid_argument("drift spec: beta must lie in (0, 1/2)");
    if (!(amplitude >= 0.0)) throw std::invalid_argument("drift spec: amplitude must be >= 0");
    if (!(epsilon_reg >= 0.0)) throw std::invalid_argument("drift spec: epsilon_reg must be >= 0");
}

SpectralField sample_random_field(const Grid& g, std::uint64_t seed, double gamma,
                                  double amplitude, std::uint64_t stream) {
    SpectralField f(g, 1);
    if (amplitude == 0.0) return f;
    const double decay = 0.5 * g.dim + gamma;  // sigma_k = |k|^{-decay}
    const int nyq = g.modes / 2;
    int kv[2] = {0, 0};
    for (std::size_t m = 0; m < g.total(); ++m) {
        f.wavevector(m, kv);
        if (!canonical(kv, g.dim)) continue;
        bool skip = false;
        for (int a = 0; a < g.dim; ++a)
            if (kv[a] == -nyq || kv[a] == nyq) skip = true;
        if (skip) continue;
        double ka = g.dim == 1 ? std::abs(static_cast<double>(kv[0])) : std::hypot(kv[0], kv[1]);
        double sigma = amplitude * std::pow(ka, -decay);
        double z0, z1;
        rng::normal_pair(seed, stream, zigzag(kv[0]), g.dim == 2 ? zigzag(kv[1]) : 0, 0xD21F, z0, z1);
        std::complex<double> v = sigma * std::complex<double>(z0, z1) / std::sqrt(2.0);
        f.coef(0, m) = v;
        // conjugate partner
        std::size_t mc;
        if (g.dim == 1) {
            mc = static_cast<std::size_t>(g.axis_index(-kv[0]));
        } else {
            mc = static_cast<std::size_t>(g.axis_index(-kv[0])) * g.modes + g.axis_index(-kv[1]);
        }
        f.coef(0, mc) = std::conj(v);
    }
    return f;
}

TimeField sample_drift(const DriftSpec& spec, const Grid& g, const std::vector<double>& times) {
    spec.validate();
    if (times.empty()) throw std::invalid_argument("sample_drift: empty time grid");
    // One independent spatial sample per component; regularity target -beta,
    // improved by the epsilon_reg margin so samples land in C^{(-beta)+}.
    std::vector<SpectralField> base;
    SpectralField field(g, g.dim);
    for (int c = 0; c < g.dim; ++c) {
        SpectralField s = sample_random_field(g, spec.seed, -spec.beta + spec.epsilon_reg,
                                              spec.amplitude, static_cast<std::uint64_t>(c) + 1);
        for (std::size_t m = 0; m < g.total(); ++m) field.coef(c, m) = s.coef(0, m);
    }
    TimeField out;
    out.times = times;
    const double T = times.back();
    for (double t : times) {
        double a = 1.0;
        if (spec.profile == DriftSpec::TimeProfile::SmoothModulated && T > 0)
            a = 1.0 + 0.5 * std::sin(2.0 * kPi * t / T);
        SpectralField snap = field;
        snap *= a;
        out.snaps.push_back(std::move(snap));
    }
    out.validate();
    return out;
}

SpectralField mollify(const SpectralField& f, int n) {
    if (n < 1) throw std::invalid_argument("mollify: n must be a positive integer");
    return heat_propagate(f, 1.0 / n);
}

TimeField mollify(const TimeField& f, int n) {
    if (n < 1) throw std::invalid_argument("mollify: n must be a positive integer");
    TimeField out;
    out.times = f.times;
    out.snaps.reserve(f.snaps.size());
    for (const auto& s : f.snaps) out.snaps.push_back(mollify(s, n));
    return out;
}

void apply_band_taper(SpectralField& f, double start_fraction, double power) {
    const Grid& g = f.grid();
    const double edge = start_fraction * (g.modes / 2);
    int kv[2];
    for (int c = 0; c < f.components(); ++c)
        for (std::size_t m = 0; m < g.total(); ++m) {
            f.wavevector(m, kv);
            double ka = g.dim == 1 ? std::abs(static_cast<double>(kv[0])) : std::hypot(kv[0], kv[1]);
            if (ka == 0.0) continue;
            f.coef(c, m) *= std::exp(-std::pow(ka / edge, power));
        }
}

void apply_band_taper(TimeField& f, double start_fraction, double power) {
    for (auto& s : f.snaps) apply_band_taper(s, start_fraction, power);
}

SpectralField make_kernel(const Grid& g, double sigma, const std::vector<double>& center,
                          int min_cells_per_sigma) {
    if (!(sigma > 0)) throw std::invalid_argument("make_kernel: sigma must be positive");
    if (sigma < min_cells_per_sigma * g.cell())
        throw std::invalid_argument(
            "make_kernel: bandwidth unresolved (fewer than " +
            std::to_string(min_cells_per_sigma) + " grid points per standard deviation)");
    std::vector<double> c = center;
    if (c.empty()) c.assign(g.dim, 0.0);
    if (static_cast<int>(c.size()) != g.dim)
        throw std::invalid_argument("make_kernel: center dimension mismatch");
    SpectralField K(g, 1);
    const double inv_vol = 1.0 / g.volume();
    int kv[2] = {0, 0};
    for (std::size_t m = 0; m < g.total(); ++m) {
        K.wavevector(m, kv);
        double phase = 0.0, x2 = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            double xi = g.xi(kv[a]);
            phase += xi * c[a];
            x2 += xi * xi;
        }
        K.coef(0, m) = inv_vol * std::exp(-0.5 * sigma * sigma * x2) *
                       std::complex<double>(std::cos(phase), -std::sin(phase));
    }
    // Clamp any truncation undershoot and renormalize to exactly unit mass.
    auto v = to_physical(K);
    double mn = 0.0;
    for (double x : v) mn = std::min(mn, x);
    if (mn < 0.0) {
        for (double& x : v) x = std::max(x, 0.0);
        K = from_physical(g, v);
    }
    double mass = integral(K);
    if (!(mass > 0)) throw std::runtime_error("make_kernel: degenerate kernel");
    K *= 1.0 / mass;
    return K;
}

SpectralField make_initial_density(const InitialDensitySpec& spec, const Grid& g) {
    if (spec.bumps.empty()) throw std::invalid_argument("initial density: no bumps");
    double wsum = 0.0;
    for (const auto& b : spec.bumps) {
        if (!(b.weight > 0)) throw std::invalid_argument("initial density: weights must be positive");
        wsum += b.weight;
    }
    SpectralField v(g, 1);
    for (const auto& b : spec.bumps) {
        std::vector<double> c = b.center;
        if (c.empty()) c.assign(g.dim, 0.5 * g.length);  // bumps default to the torus midpoint
        SpectralField bump = make_kernel(g, b.width, c);
        bump *= b.weight / wsum;
        v += bump;
    }
    auto phys = to_physical(v);
    double mn = 0.0, mx = 0.0;
    for (double x : phys) { mn = std::min(mn, x); mx = std::max(mx, std::abs(x)); }
    if (mn < -1e-12 * std::max(mx, 1.0)) {
        for (double& x : phys) x = std::max(x, 0.0);
        v = from_physical(g, phys);
    }
    v *= 1.0 / integral(v);
    return v;
}

}  // namespace sfpe
