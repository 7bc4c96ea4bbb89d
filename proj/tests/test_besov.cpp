#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "sfpe/besov.hpp"
#include "sfpe/drift.hpp"
#include "test_support.hpp"

using namespace sfpe;

TEST_CASE("dyadic blocks partition and reconstruct") {
    Grid g = ts::grid1(256);
    BesovParams p = besov_params(g, 0.0);
    CHECK(p.trusted_level_J == 6);
    CHECK(p.top_level == 8);

    SUBCASE("constant sits in the low block") {
        SpectralField c = ts::constant(g, 3.0);
        CHECK(block_sup(c, -1) == doctest::Approx(3.0).epsilon(1e-12));
        for (int j = 1; j <= p.top_level; ++j) CHECK(block_sup(c, j) == 0.0);
    }
    SUBCASE("|k| = 4 lands in block 3, annulus [4, 8)") {
        SpectralField f = ts::cosine(g, 4);
        CHECK(block_sup(f, 3) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(block_sup(f, 2) == 0.0);
        CHECK(block_sup(f, 4) == 0.0);
        CHECK(block_level(4.0) == 3);
        CHECK(block_level(7.99) == 3);
        CHECK(block_level(8.0) == 4);
    }
    SUBCASE("blocks sum back to the field") {
        SpectralField f = ts::random_field(g, 13, -0.2);
        SpectralField sum(g, 1);
        for (int j = -1; j <= p.top_level; ++j) sum += dyadic_block(f, j);
        double worst = 0.0, scale = 0.0;
        for (std::size_t m = 0; m < g.total(); ++m) {
            worst = std::max(worst, std::abs(sum.coef(0, m) - f.coef(0, m)));
            scale = std::max(scale, std::abs(f.coef(0, m)));
        }
        CHECK(worst <= 1e-12 * scale);
        CHECK_THROWS(dyadic_block(f, p.top_level + 1));
        CHECK_THROWS(dyadic_block(f, -2));
    }
}

TEST_CASE("besov norm basics") {
    Grid g = ts::grid1(256);
    SUBCASE("constant has norm |c| at any exponent") {
        SpectralField c = ts::constant(g, -2.5);
        CHECK(besov_norm_value(c, 0.7) == doctest::Approx(2.5).epsilon(1e-12));
        CHECK(besov_norm_value(c, -0.4) == doctest::Approx(2.5).epsilon(1e-12));
    }
    SUBCASE("single mode weighted by 2^{j gamma}") {
        double gamma = 0.6;
        SpectralField f = ts::cosine(g, 9);  // block floor(log2 9)+1 = 4
        NormReport r = besov_norm(f, gamma);
        CHECK(r.besov_norm ==
              doctest::Approx(std::exp2(4 * gamma) * block_sup(f, 4)).epsilon(1e-12));
        CHECK(r.besov_norm == doctest::Approx(r.per_level[4 + 1]).epsilon(1e-12));
    }
    SUBCASE("embedding: norm monotone in the exponent") {
        SpectralField f = ts::random_field(g, 19, 0.1);
        CHECK(besov_norm_value(f, 0.2) <= besov_norm_value(f, 0.5));
        CHECK(besov_norm_value(f, -0.5) <= besov_norm_value(f, -0.2));
    }
    SUBCASE("white-noise-style field has flat levels at gamma = -beta") {
        double beta = 0.3;
        Grid fine = ts::grid1(1024);
        SpectralField f = sample_random_field(fine, 4242, -beta + 0.05);
        NormReport r = besov_norm(f, -beta);
        BesovParams p = besov_params(fine, 0.0);
        std::vector<double> xs, ys;
        for (int j = 2; j <= p.trusted_level_J; ++j) {
            xs.push_back(j);
            ys.push_back(std::log2(r.per_level[j + 1]));
        }
        LineFit fit = fit_line(xs, ys);
        CHECK(std::abs(fit.slope) <= 0.15);
    }
}

TEST_CASE("holder norm") {
    SUBCASE("constant has zero seminorm") {
        Grid g = ts::grid1(128);
        NormReport r = holder_norm(ts::constant(g, 1.7), 0.5);
        CHECK(r.holder_sup == doctest::Approx(1.7).epsilon(1e-12));
        CHECK(r.holder_seminorm == 0.0);
        CHECK_THROWS(holder_norm(ts::constant(g, 1.0), 1.5));
        CHECK_THROWS(holder_norm(ts::constant(g, 1.0), 0.0));
    }
    SUBCASE("sin x at gamma = 1/2: frozen brute-force value") {
        Grid g = ts::grid1(256, 2.0 * ts::kPi);
        SpectralField s = ts::cosine(g, 1, 1.0, -ts::kPi / 2);
        NormReport r = holder_norm(s, 0.5);
        // Exhaustive pair maximization over the 256-point grid.
        CHECK(r.holder_seminorm == doctest::Approx(1.203765712036889).epsilon(1e-12));
        CHECK(r.holder_sup == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("holder/besov equivalence ratio stays in one interval across N") {
        double gamma = 0.4;
        double lo = 1e300, hi = 0.0;
        for (int n : {256, 512, 1024}) {
            Grid g = ts::grid1(n);
            for (int i = 0; i < 20; ++i) {
                SpectralField f = ts::random_field(g, 31337, gamma + 0.1, i);
                double h = holder_norm(f, gamma).besov_norm;
                double b = besov_norm_value(f, gamma);
                double ratio = h / b;
                lo = std::min(lo, ratio);
                hi = std::max(hi, ratio);
            }
        }
        CHECK(lo > 0.05);
        CHECK(hi < 20.0);
        CHECK(hi / lo < 25.0);  // stable equivalence band over 60 fields, 3 resolutions
    }
}

TEST_CASE("scaling law: dilation shifts levels by one") {
    Grid g = ts::grid1(256);
    int k = 12;  // block 4
    SpectralField f = ts::cosine(g, k, 0.8, 0.37);
    SpectralField f2(g, 1);  // f(2x): mode 2k
    f2.coef(0, static_cast<std::size_t>(g.axis_index(2 * k))) =
        f.coef(0, static_cast<std::size_t>(g.axis_index(k)));
    f2.coef(0, static_cast<std::size_t>(g.axis_index(-2 * k))) =
        f.coef(0, static_cast<std::size_t>(g.axis_index(-k)));
    CHECK(block_sup(f2, 5) == doctest::Approx(block_sup(f, 4)).epsilon(1e-12));
}

TEST_CASE("rho norms and distances") {
    Grid g = ts::grid1(128);
    TimeField v;
    v.times = uniform_times(0.5, 8);
    for (double t : v.times) {
        (void)t;
        v.snaps.push_back(ts::random_field(g, 5, 0.3));
    }
    SUBCASE("rho = 0 is the plain sup in time") {
        double a = rho_norm(v, 0.0, 0.3);
        double b = 0.0;
        for (const auto& s : v.snaps) b = std::max(b, besov_norm_value(s, 0.3));
        CHECK(a == doctest::Approx(b).epsilon(1e-13));
    }
    SUBCASE("constant-in-time field attains the norm at t = 0") {
        double a = rho_norm(v, 3.0, 0.3);
        CHECK(a == doctest::Approx(besov_norm_value(v.snaps[0], 0.3)).epsilon(1e-13));
    }
    SUBCASE("distance of a field to itself vanishes; metric axioms") {
        CHECK(rho_distance(v, v, 1.0, 0.3) == 0.0);
        TimeField w = v, u = v;
        for (std::size_t j = 0; j < v.snaps.size(); ++j) {
            w.snaps[j] = ts::random_field(g, 6, 0.3, j);
            u.snaps[j] = ts::random_field(g, 7, 0.3, j);
        }
        double dvw = rho_distance(v, w, 1.0, 0.3);
        double dwv = rho_distance(w, v, 1.0, 0.3);
        CHECK(dvw == doctest::Approx(dwv).epsilon(1e-13));
        double dvu = rho_distance(v, u, 1.0, 0.3);
        double dwu = rho_distance(w, u, 1.0, 0.3);
        CHECK(dvu <= dvw + dwu + 1e-12 * (dvw + dwu));
    }
}

TEST_CASE("schauder constants") {
    double alpha = 0.25, beta = 0.3;
    double theta = 0.5 * (alpha + beta + 1.0);
    std::vector<double> t_grid;
    for (int q = 0; q <= 12; ++q) t_grid.push_back(std::pow(10.0, -4.0 + 3.3 * q / 12.0));

    SUBCASE("single low mode matches the closed-form multiplier ratio") {
        Grid g = ts::grid1(128);
        int k = 2;
        SpectralField f = ts::cosine(g, k);
        SchauderReport rep = schauder_constants({f}, -alpha, theta, t_grid);
        // One mode: |P_t f|_{2theta-alpha} / |f|_{-alpha} = 2^{j(2theta)} ... the
        // weights cancel to 2^{2 j theta} e^{-t xi^2/2} with j = block(k) = 2.
        double xi = g.xi(k);
        double expect = 0.0;
        int j = block_level(k);
        for (double t : t_grid)
            expect = std::max(expect, std::pow(t, theta) * std::exp2(2.0 * theta * j) *
                                          std::exp(-0.5 * t * xi * xi));
        CHECK(rep.smoothing_constant == doctest::Approx(expect).epsilon(1e-10));
    }
    SUBCASE("ensemble of rough fields gives finite stable constants") {
        Grid g = ts::grid1(256);
        std::vector<SpectralField> ens;
        for (int i = 0; i < 20; ++i) ens.push_back(ts::random_field(g, 99, -alpha + 0.05, i));
        SchauderReport rep = schauder_constants(ens, -alpha, theta, t_grid);
        CHECK(rep.smoothing_constant > 0.0);
        CHECK(rep.smoothing_constant < 1e3);
        CHECK(rep.approach_constant > 0.0);
        CHECK(rep.approach_constant < 1e3);
        CHECK_THROWS(schauder_constants({}, -alpha, theta, t_grid));
    }
    SUBCASE("P_t f -> f as t -> 0, decreasing on dyadic times") {
        Grid g = ts::grid1(128);
        SpectralField f = ts::random_field(g, 123, 0.8);
        double prev = 1e300;
        for (double t : {1e-1, 1e-2, 1e-3, 1e-4}) {
            double d = besov_norm_value(heat_propagate(f, t) - f, 0.3);
            CHECK(d < prev);
            prev = d;
        }
        CHECK(prev < 1e-3);
    }
}

TEST_CASE("regularity estimation matches the synthesis target") {
    Grid g = ts::grid1(1024);
    for (double gamma : {-0.3, -0.2, 0.4}) {
        SpectralField f = sample_random_field(g, 777, gamma);
        RegularityFit fit = estimate_regularity(f);
        CHECK(std::abs(fit.gamma_hat - gamma) <= 0.15);
    }
}

TEST_CASE("norm report serializes with the fixed key set") {
    Grid g = ts::grid1(128);
    NormReport r = besov_norm(ts::constant(g, 1.0), 0.3);
    std::string j = r.to_json();
    for (const char* key :
         {"besov_norm", "per_level", "holder_sup", "holder_seminorm", "gamma", "rho"})
        CHECK(j.find(key) != std::string::npos);
}
