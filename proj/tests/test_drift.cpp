#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "sfpe/besov.hpp"
#include "sfpe/drift.hpp"
#include "test_support.hpp"

using namespace sfpe;

namespace {

DriftSpec spec_beta(double beta, std::uint64_t seed) {
    DriftSpec s;
    s.beta = beta;
    s.seed = seed;
    return s;
}

}  // namespace

TEST_CASE("drift sampling determinism and validation") {
    Grid g = ts::grid1(256);
    auto times = uniform_times(0.5, 4);

    SUBCASE("zero amplitude gives the zero drift") {
        DriftSpec s = spec_beta(0.3, 1);
        s.amplitude = 0.0;
        TimeField b = sample_drift(s, g, times);
        for (const auto& snap : b.snaps)
            for (std::size_t m = 0; m < g.total(); ++m) CHECK(std::abs(snap.coef(0, m)) == 0.0);
    }
    SUBCASE("same seed reproduces bit for bit; different seeds differ") {
        TimeField a = sample_drift(spec_beta(0.3, 42), g, times);
        TimeField b = sample_drift(spec_beta(0.3, 42), g, times);
        TimeField c = sample_drift(spec_beta(0.3, 43), g, times);
        bool differs = false;
        for (std::size_t m = 0; m < g.total(); ++m) {
            CHECK(a.snaps[0].coef(0, m) == b.snaps[0].coef(0, m));
            if (a.snaps[0].coef(0, m) != c.snaps[0].coef(0, m)) differs = true;
        }
        CHECK(differs);
    }
    SUBCASE("invalid exponents are rejected") {
        CHECK_THROWS(sample_drift(spec_beta(0.6, 1), g, times));
        CHECK_THROWS(sample_drift(spec_beta(-0.1, 1), g, times));
    }
    SUBCASE("smooth modulation scales snapshots by 1 + sin(2 pi t / T)/2") {
        DriftSpec s = spec_beta(0.3, 7);
        s.profile = DriftSpec::TimeProfile::SmoothModulated;
        TimeField b = sample_drift(s, g, times);
        double t = times[1];
        double a = 1.0 + 0.5 * std::sin(2.0 * ts::kPi * t / times.back());
        for (std::size_t m = 0; m < 40; ++m)
            CHECK(b.snaps[1].coef(0, m) == a * b.snaps[0].coef(0, m));
    }
}

TEST_CASE("sampled drift certifies its regularity target") {
    Grid g = ts::grid1(1024);
    TimeField b = sample_drift(spec_beta(0.3, 2024), g, {0.0, 0.5});
    SpectralField comp(g, 1);
    for (std::size_t m = 0; m < g.total(); ++m) comp.coef(0, m) = b.snaps[0].coef(0, m);
    RegularityFit fit = estimate_regularity(comp);
    CHECK(std::abs(fit.gamma_hat - (-0.3)) <= 0.15);
}

TEST_CASE("doubling the resolution preserves shared-level block sups") {
    DriftSpec s = spec_beta(0.3, 555);
    Grid coarse = ts::grid1(256), fine = ts::grid1(512);
    TimeField bc = sample_drift(s, coarse, {0.0, 0.5});
    TimeField bf = sample_drift(s, fine, {0.0, 0.5});
    SpectralField cc(coarse, 1), cf(fine, 1);
    for (std::size_t m = 0; m < coarse.total(); ++m) cc.coef(0, m) = bc.snaps[0].coef(0, m);
    for (std::size_t m = 0; m < fine.total(); ++m) cf.coef(0, m) = bf.snaps[0].coef(0, m);
    // Shared levels: annuli fully resolved (Nyquist-free) at the coarse grid.
    BesovParams p = besov_params(coarse, 0.0);
    for (int j = -1; j <= p.trusted_level_J + 1; ++j) {
        double a = block_sup(cc, j), b = block_sup(cf, j);
        CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("mollification") {
    Grid g = ts::grid1(128, 2.0 * ts::kPi);

    SUBCASE("single mode damps by exp(-k^2 / 2n) on the unit torus") {
        int n = 16, k = 3;
        SpectralField f = ts::cosine(g, k);
        SpectralField fm = mollify(f, n);
        double expected = 0.5 * std::exp(-k * k / (2.0 * n));
        CHECK(std::abs(fm.coef(0, static_cast<std::size_t>(g.axis_index(k)))) ==
              doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("constants are unchanged and n = 0 is rejected") {
        SpectralField c = ts::constant(g, 0.9);
        SpectralField cm = mollify(c, 4);
        CHECK(cm.coef(0, 0).real() == 0.9);
        CHECK_THROWS(mollify(c, 0));
    }
    SUBCASE("mollified drift converges to the drift as n grows") {
        Grid gg = ts::grid1(512);
        TimeField b = sample_drift(spec_beta(0.3, 9), gg, {0.0, 0.5});
        double prev = 1e300;
        for (int n : {4, 16, 64, 256}) {
            TimeField bn = mollify(b, n);
            double d = rho_distance(b, bn, 0.0, -0.3 - 0.1);
            CHECK(d < prev);
            prev = d;
        }
        // The -(beta+0.1) norm converges like n^{-0.075} here, so the ladder
        // end should sit clearly below the start but not by orders.
        CHECK(prev < 0.8 * rho_distance(b, mollify(b, 4), 0.0, -0.4));
    }
    SUBCASE("mollification is smooth: finite positive-exponent norm") {
        Grid gg = ts::grid1(512);
        TimeField b = sample_drift(spec_beta(0.3, 9), gg, {0.0, 0.5});
        TimeField bn = mollify(b, 16);
        CHECK(rho_norm(bn, 0.0, 1.5) < 1e6);
    }
    SUBCASE("linear and commutes with the heat semigroup") {
        SpectralField f = ts::random_field(g, 5, -0.2);
        SpectralField h = ts::random_field(g, 6, -0.2, 1);
        SpectralField lhs = mollify(f + h, 8);
        SpectralField rhs = mollify(f, 8) + mollify(h, 8);
        double worst = 0.0;
        for (std::size_t m = 0; m < g.total(); ++m)
            worst = std::max(worst, std::abs(lhs.coef(0, m) - rhs.coef(0, m)));
        CHECK(worst < 1e-12);
        SpectralField a = mollify(heat_propagate(f, 0.2), 8);
        SpectralField b2 = heat_propagate(mollify(f, 8), 0.2);
        worst = 0.0;
        for (std::size_t m = 0; m < g.total(); ++m)
            worst = std::max(worst, std::abs(a.coef(0, m) - b2.coef(0, m)));
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("initial densities and kernels") {
    Grid g = ts::grid1(512);

    SUBCASE("gaussian bump is a probability density") {
        InitialDensitySpec spec;
        spec.bumps = {{{0.5 * g.length}, 2.0, 1.0}};
        SpectralField v0 = make_initial_density(spec, g);
        CHECK(integral(v0) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(min_value(v0) >= -1e-12 * max_abs(v0));
        CHECK(l1_norm(v0) <= 1.0 + 1e-8);  // S_{L^1} membership
    }
    SUBCASE("equal mixture of two bumps has unit mass") {
        InitialDensitySpec spec;
        spec.bumps = {{{g.length / 3}, 1.5, 0.5}, {{2 * g.length / 3}, 2.5, 0.5}};
        SpectralField v0 = make_initial_density(spec, g);
        CHECK(integral(v0) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(min_value(v0) >= -1e-12 * max_abs(v0));
    }
    SUBCASE("kernel self-convolution widens the bandwidth by sqrt(2)") {
        double sigma = 1.2;
        SpectralField K = make_kernel(g, sigma);
        SpectralField KK = convolve(K, K);
        // Second moment about the center by direct quadrature.
        auto variance = [&](const SpectralField& f) {
            auto v = to_physical(f);
            double s = 0.0;
            for (int j = 0; j < g.modes; ++j) {
                double x = j * g.cell();
                if (x > 0.5 * g.length) x -= g.length;  // signed torus distance to 0
                s += x * x * v[j] * g.cell();
            }
            return s;
        };
        double r = std::sqrt(variance(KK) / variance(K));
        CHECK(r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
    }
    SUBCASE("unresolvable bandwidth is rejected") {
        CHECK_THROWS_WITH_AS(make_kernel(g, 0.3), doctest::Contains("unresolved"),
                             std::invalid_argument);
    }
}
