#include "sfpe/besov.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "sfpe/fft.hpp"
#include "sfpe/parallel.hpp"
#include "sfpe/rng.hpp"

namespace sfpe {

namespace {

int int_log2(int n) {
    int j = 0;
    while ((1 << (j + 1)) <= n) ++j;
    return j;
}

double weight(int j, double gamma) {
    return j <= 0 ? 1.0 : std::exp2(j * gamma);
}

// Oversampled grid size for level j; independent of the ambient resolution
// for all levels at or below trusted_level_J + 1.
int sup_grid(int j, const Grid& g) {
    int base = j < 0 ? 32 : 8 << std::max(j, 2);
    base = std::max(base, 32);
    return std::min(base, 4 * g.modes);
}

}  // namespace

BesovParams besov_params(const Grid& g, double gamma) {
    BesovParams p;
    p.gamma = gamma;
    p.trusted_level_J = int_log2(g.modes / 2) - 1;
    p.top_level = int_log2(g.modes / 2) + 1;
    return p;
}

int block_level(double k_abs) {
    if (k_abs < 1.0) return -1;
    return static_cast<int>(std::floor(std::log2(k_abs))) + 1;
}

SpectralField dyadic_block(const SpectralField& f, int j) {
    BesovParams p = besov_params(f.grid(), 0.0);
    if (j < -1 || j > p.top_level) throw std::invalid_argument("dyadic_block: level out of range");
    SpectralField out = f;
    int kv[2];
    for (int c = 0; c < f.components(); ++c)
        for (std::size_t m = 0; m < f.modes_total(); ++m) {
            f.wavevector(m, kv);
            double ka = f.grid().dim == 1 ? std::abs(static_cast<double>(kv[0]))
                                          : std::hypot(kv[0], kv[1]);
            if (block_level(ka) != j) out.coef(c, m) = 0.0;
        }
    return out;
}

double block_sup(const SpectralField& f, int j) {
    const Grid& g = f.grid();
    int msz = sup_grid(j, g);
    Grid eg{g.dim, msz, g.length};
    std::vector<std::complex<double>> buf(eg.total());
    std::vector<std::complex<double>> phys(eg.total());
    double result = 0.0;
    int kv[2];
    for (int c = 0; c < f.components(); ++c) {
        std::fill(buf.begin(), buf.end(), std::complex<double>(0.0, 0.0));
        bool any = false;
        for (std::size_t m = 0; m < f.modes_total(); ++m) {
            f.wavevector(m, kv);
            double ka = g.dim == 1 ? std::abs(static_cast<double>(kv[0])) : std::hypot(kv[0], kv[1]);
            if (block_level(ka) != j) continue;
            const auto& v = f.coef(c, m);
            if (v == std::complex<double>(0.0, 0.0)) continue;
            any = true;
            // Place at the same wavenumber on the oversampled grid. Modes at
            // the source Nyquist split across the pair like resample does.
            bool at_nyq[2] = {false, false};
            for (int a = 0; a < g.dim; ++a) at_nyq[a] = (kv[a] == -g.modes / 2) && msz > g.modes;
            auto deposit = [&](int k0, int k1, double w) {
                std::size_t idx = g.dim == 1
                                      ? static_cast<std::size_t>(eg.axis_index(k0))
                                      : static_cast<std::size_t>(eg.axis_index(k0)) * msz +
                                            eg.axis_index(k1);
                buf[idx] += w * v;
            };
            if (g.dim == 1) {
                if (at_nyq[0]) { deposit(kv[0], 0, 0.5); deposit(-kv[0], 0, 0.5); }
                else deposit(kv[0], 0, 1.0);
            } else {
                int c0 = at_nyq[0] ? 2 : 1, c1 = at_nyq[1] ? 2 : 1;
                for (int i0 = 0; i0 < c0; ++i0)
                    for (int i1 = 0; i1 < c1; ++i1)
                        deposit(i0 ? -kv[0] : kv[0], i1 ? -kv[1] : kv[1],
                                1.0 / (c0 * c1));
            }
        }
        if (!any) continue;
        fft::c2c(eg.dim, msz, buf.data(), phys.data(), +1);
        for (const auto& z : phys) result = std::max(result, std::abs(z.real()));
    }
    return result;
}

NormReport besov_norm(const SpectralField& f, double gamma) {
    BesovParams p = besov_params(f.grid(), gamma);
    NormReport r;
    r.gamma = gamma;
    r.per_level.assign(p.top_level + 2, 0.0);
    for (int j = -1; j <= p.top_level; ++j) {
        double s = block_sup(f, j);
        r.per_level[j + 1] = weight(j, gamma) * s;
        r.besov_norm = std::max(r.besov_norm, r.per_level[j + 1]);
    }
    return r;
}

double besov_norm_value(const SpectralField& f, double gamma) {
    return besov_norm(f, gamma).besov_norm;
}

NormReport holder_norm(const SpectralField& f, double gamma, std::uint64_t pair_seed) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("holder_norm: gamma must lie in (0,1)");
    if (f.components() != 1) throw std::invalid_argument("holder_norm expects a scalar field");
    const Grid& g = f.grid();
    auto v = to_physical(f);
    const std::size_t n = v.size();

    NormReport r;
    r.gamma = gamma;
    for (double x : v) r.holder_sup = std::max(r.holder_sup, std::abs(x));

    auto coord = [&](std::size_t i, int axis) {
        if (g.dim == 1) return static_cast<double>(i) * g.cell();
        return static_cast<double>(axis == 0 ? i / g.modes : i % g.modes) * g.cell();
    };
    auto torus_dist = [&](std::size_t i, std::size_t k) {
        double s = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            double d = std::abs(coord(i, a) - coord(k, a));
            d = std::min(d, g.length - d);
            s += d * d;
        }
        return std::sqrt(s);
    };
    double semi = 0.0;
    if (n <= 512) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = i + 1; k < n; ++k) {
                double d = torus_dist(i, k);
                if (d == 0.0) continue;
                semi = std::max(semi, std::abs(v[i] - v[k]) / std::pow(d, gamma));
            }
    } else {
        const std::size_t samples = 1000000;
        for (std::size_t s = 0; s < samples; ++s) {
            double u0, u1;
            rng::uniform_pair(pair_seed, s, 17, 0, 0, u0, u1);
            std::size_t i = static_cast<std::size_t>(u0 * n) % n;
            std::size_t k = static_cast<std::size_t>(u1 * n) % n;
            if (i == k) continue;
            double d = torus_dist(i, k);
            semi = std::max(semi, std::abs(v[i] - v[k]) / std::pow(d, gamma));
        }
    }
    r.holder_seminorm = semi;
    r.besov_norm = r.holder_sup + r.holder_seminorm;  // Holder-Zygmund total
    return r;
}

double rho_norm(const TimeField& v, double rho, double gamma) {
    if (rho < 0) throw std::invalid_argument("rho_norm: rho must be nonnegative");
    v.validate();
    std::vector<double> vals(v.snaps.size());
    parallel_for(v.snaps.size(), [&](std::size_t i) {
        vals[i] = std::exp(-rho * v.times[i]) * besov_norm_value(v.snaps[i], gamma);
    });
    return *std::max_element(vals.begin(), vals.end());
}

double rho_distance(const TimeField& v, const TimeField& w, double rho, double gamma) {
    if (v.times != w.times) throw std::invalid_argument("rho_distance: time grids differ");
    std::vector<double> vals(v.snaps.size());
    parallel_for(v.snaps.size(), [&](std::size_t i) {
        vals[i] = std::exp(-rho * v.times[i]) *
                  besov_norm_value(v.snaps[i] - w.snaps[i], gamma);
    });
    return *std::max_element(vals.begin(), vals.end());
}

RegularityFit estimate_regularity(const SpectralField& f, int min_level) {
    BesovParams p = besov_params(f.grid(), 0.0);
    const Grid& g = f.grid();
    // Modes per annulus, for the Gaussian-maximum envelope sqrt(2 ln n)
    // divided out before fitting: the sup of an n-mode random block sits a
    // factor sqrt(2 ln n) above its per-point standard deviation.
    std::vector<double> n_modes(p.top_level + 2, 0.0);
    {
        int kv[2];
        for (std::size_t m = 0; m < g.total(); ++m) {
            f.wavevector(m, kv);
            double ka = g.dim == 1 ? std::abs(static_cast<double>(kv[0])) : std::hypot(kv[0], kv[1]);
            n_modes[block_level(ka) + 1] += 1.0;
        }
    }
    RegularityFit fit;
    std::vector<double> xs, ys;
    for (int j = std::max(min_level, 1); j <= p.trusted_level_J; ++j) {
        double s = block_sup(f, j);
        if (s <= 0.0) continue;
        double envelope = std::sqrt(2.0 * std::log(std::max(n_modes[j + 1], 2.0)));
        fit.levels.push_back(j);
        fit.log2_sups.push_back(std::log2(s));
        xs.push_back(j);
        ys.push_back(std::log2(s / envelope));
    }
    if (xs.size() < 2) throw std::invalid_argument("estimate_regularity: too few populated levels");
    LineFit lf = fit_line(xs, ys);
    fit.slope = lf.slope;
    fit.gamma_hat = -lf.slope;
    fit.r_squared = lf.r_squared;
    return fit;
}

SchauderReport schauder_constants(const std::vector<SpectralField>& ensemble, double gamma,
                                  double theta, const std::vector<double>& t_grid) {
    if (ensemble.empty()) throw std::invalid_argument("schauder_constants: empty ensemble");
    SchauderReport rep;
    rep.theta = theta;
    rep.gamma = gamma;
    rep.ensemble_size = static_cast<int>(ensemble.size());
    const double up = 2.0 * theta + gamma;
    std::vector<double> c1(ensemble.size(), 0.0), c2(ensemble.size(), 0.0);
    parallel_for(ensemble.size(), [&](std::size_t i) {
        const auto& f = ensemble[i];
        double base_lo = besov_norm_value(f, gamma);
        double base_hi = besov_norm_value(f, up);
        for (double t : t_grid) {
            if (!(t > 0)) continue;
            SpectralField pt = heat_propagate(f, t);
            if (base_lo > 0)
                c1[i] = std::max(c1[i], std::pow(t, theta) * besov_norm_value(pt, up) / base_lo);
            if (base_hi > 0)
                c2[i] = std::max(c2[i],
                                 std::pow(t, -theta) * besov_norm_value(pt - f, gamma) / base_hi);
        }
    });
    rep.smoothing_constant = *std::max_element(c1.begin(), c1.end());
    rep.approach_constant = *std::max_element(c2.begin(), c2.end());
    return rep;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 points");
    double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i]; sy += y[i];
        sxx += x[i] * x[i]; sxy += x[i] * y[i]; syy += y[i] * y[i];
    }
    double denom = n * sxx - sx * sx;
    LineFit f;
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    double ss_tot = syy - sy * sy / n;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double e = y[i] - (f.slope * x[i] + f.intercept);
        ss_res += e * e;
    }
    f.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

std::string NormReport::to_json() const {
    nlohmann::json j;
    j["besov_norm"] = besov_norm;
    j["per_level"] = per_level;
    j["holder_sup"] = holder_sup;
    j["holder_seminorm"] = holder_seminorm;
    j["gamma"] = gamma;
    j["rho"] = rho;
    return j.dump(2);
}

}  // namespace sfpe
