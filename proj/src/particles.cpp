#include "sfpe/particles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sfpe/drift.hpp"
#include "sfpe/parallel.hpp"
#include "sfpe/rng.hpp"

namespace sfpe {

namespace {

// Stream tags separating the independent random uses of one seed.
constexpr std::uint64_t kStreamInit = 0xA1;
constexpr std::uint64_t kStreamStep = 0xB2;
constexpr std::uint64_t kStreamFk = 0xC3;

double wrap(double x, double L) {
    x = std::fmod(x, L);
    return x < 0 ? x + L : x;
}

// Catmull-Rom interpolation on a periodic grid.
double cubic_1d(const std::vector<double>& v, int n, double u) {
    int j = static_cast<int>(std::floor(u));
    double f = u - j;
    auto at = [&](int i) { return v[static_cast<std::size_t>(((i % n) + n) % n)]; };
    double p0 = at(j - 1), p1 = at(j), p2 = at(j + 1), p3 = at(j + 2);
    return 0.5 * (2.0 * p1 + (-p0 + p2) * f + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * f * f +
                  (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * f * f * f);
}

double cubic_2d(const std::vector<double>& v, int n, double u0, double u1) {
    int j0 = static_cast<int>(std::floor(u0));
    double f0 = u0 - j0;
    std::vector<double> rows(4);
    for (int r = -1; r <= 2; ++r) {
        int i0 = (((j0 + r) % n) + n) % n;
        // interpolate along axis 1 within row i0
        int j1 = static_cast<int>(std::floor(u1));
        double f1 = u1 - j1;
        auto at = [&](int i) {
            int i1 = ((i % n) + n) % n;
            return v[static_cast<std::size_t>(i0) * n + i1];
        };
        double p0 = at(j1 - 1), p1 = at(j1), p2 = at(j1 + 1), p3 = at(j1 + 2);
        rows[r + 1] = 0.5 * (2.0 * p1 + (-p0 + p2) * f1 +
                             (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * f1 * f1 +
                             (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * f1 * f1 * f1);
    }
    double p0 = rows[0], p1 = rows[1], p2 = rows[2], p3 = rows[3];
    return 0.5 * (2.0 * p1 + (-p0 + p2) * f0 + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * f0 * f0 +
                  (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * f0 * f0 * f0);
}

double interp(const std::vector<double>& grid_vals, const Grid& g, const double* x) {
    if (g.dim == 1) return cubic_1d(grid_vals, g.modes, x[0] / g.cell());
    return cubic_2d(grid_vals, g.modes, x[0] / g.cell(), x[1] / g.cell());
}

// Physical grids of a (possibly vector) snapshot interpolated linearly in t.
std::vector<std::vector<double>> physical_at_time(const TimeField& f, double t) {
    const auto& times = f.times;
    std::size_t hi = 1;
    while (hi + 1 < times.size() && times[hi] < t) ++hi;
    std::size_t lo = hi - 1;
    double w = times[hi] > times[lo] ? (t - times[lo]) / (times[hi] - times[lo]) : 0.0;
    w = std::clamp(w, 0.0, 1.0);
    int comps = f.snaps.front().components();
    std::vector<std::vector<double>> out(comps);
    SpectralField mix = f.snaps[lo];
    mix *= (1.0 - w);
    SpectralField hi_part = f.snaps[hi];
    hi_part *= w;
    mix += hi_part;
    for (int c = 0; c < comps; ++c) out[c] = to_physical(mix, c);
    return out;
}

}  // namespace

SpectralField deposit_density(const ParticleEnsemble& e, const Grid& g) {
    if (e.dim != g.dim || std::abs(e.length - g.length) > 1e-12 * g.length)
        throw std::invalid_argument("deposit_density: ensemble/grid mismatch");
    const int n = e.size();
    if (n == 0) throw std::invalid_argument("deposit_density: empty ensemble");
    const int N = g.modes;
    const double cell = g.cell();
    double cellvol = 1.0;
    for (int a = 0; a < g.dim; ++a) cellvol *= cell;
    const double weight = 1.0 / (n * cellvol);

    const std::size_t nchunks = chunk_count(static_cast<std::size_t>(n));
    std::vector<std::vector<double>> partial(nchunks, std::vector<double>(g.total(), 0.0));
    const std::size_t cs = chunk_size(static_cast<std::size_t>(n));
    parallel_chunks(static_cast<std::size_t>(n), [&](std::size_t lo, std::size_t hi) {
        std::vector<double>& acc = partial[lo / cs];
        for (std::size_t i = lo; i < hi; ++i) {
            if (g.dim == 1) {
                double u = wrap(e.coord(static_cast<int>(i), 0), g.length) / cell;
                int j = static_cast<int>(std::floor(u));
                double f = u - j;
                acc[static_cast<std::size_t>(j % N)] += weight * (1.0 - f);
                acc[static_cast<std::size_t>((j + 1) % N)] += weight * f;
            } else {
                double u0 = wrap(e.coord(static_cast<int>(i), 0), g.length) / cell;
                double u1 = wrap(e.coord(static_cast<int>(i), 1), g.length) / cell;
                int j0 = static_cast<int>(std::floor(u0)), j1 = static_cast<int>(std::floor(u1));
                double f0 = u0 - j0, f1 = u1 - j1;
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) {
                        std::size_t idx = static_cast<std::size_t>((j0 + a) % N) * N + (j1 + b) % N;
                        acc[idx] += weight * (a ? f0 : 1.0 - f0) * (b ? f1 : 1.0 - f1);
                    }
            }
        }
    });
    std::vector<double> dens(g.total(), 0.0);
    for (std::size_t c = 0; c < nchunks; ++c)
        for (std::size_t i = 0; i < dens.size(); ++i) dens[i] += partial[c][i];
    return from_physical(g, dens);
}

SpectralField empirical_convolution(const SpectralField& K, const ParticleEnsemble& e,
                                    const Grid& g) {
    return convolve(K, deposit_density(e, g));
}

SpectralField density_estimate(const ParticleEnsemble& e, double bandwidth, const Grid& g) {
    if (bandwidth < 2.0 * g.cell())
        throw std::invalid_argument("density_estimate: bandwidth under grid resolution");
    SpectralField kde = make_kernel(g, bandwidth, std::vector<double>(g.dim, 0.0),
                                    /*min_cells_per_sigma=*/2);
    return convolve(kde, deposit_density(e, g));
}

ParticleEnsemble sample_initial_positions(const SpectralField& v0, int n_particles,
                                          std::uint64_t seed) {
    const Grid& g = v0.grid();
    ParticleEnsemble e;
    e.dim = g.dim;
    e.length = g.length;
    e.seed = seed;
    e.pos.assign(static_cast<std::size_t>(n_particles) * g.dim, 0.0);

    if (g.dim == 1) {
        const int table = 4096;
        SpectralField fine = resample(v0, table);
        auto dens = to_physical(fine);
        for (double& x : dens) x = std::max(x, 0.0);
        std::vector<double> cdf(table + 1, 0.0);
        double step = g.length / table;
        for (int i = 0; i < table; ++i) cdf[i + 1] = cdf[i] + dens[i] * step;
        double total = cdf.back();
        if (!(total > 0)) throw std::invalid_argument("sample_initial_positions: degenerate density");
        for (auto& x : cdf) x /= total;
        parallel_for(static_cast<std::size_t>(n_particles), [&](std::size_t i) {
            double u = rng::uniform(seed, i, kStreamInit, 0, 0);
            auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
            int j = std::max<int>(1, static_cast<int>(it - cdf.begin()));
            j = std::min(j, table);
            double span = cdf[j] - cdf[j - 1];
            double f = span > 0 ? (u - cdf[j - 1]) / span : 0.5;
            e.pos[i] = (j - 1 + f) * step;
        });
    } else {
        auto dens = to_physical(v0);
        double vmax = 0.0;
        for (double x : dens) vmax = std::max(vmax, x);
        vmax *= 1.05;
        parallel_for(static_cast<std::size_t>(n_particles), [&](std::size_t i) {
            for (std::uint64_t attempt = 0;; ++attempt) {
                double u0, u1;
                rng::uniform_pair(seed, i, kStreamInit, attempt, 1, u0, u1);
                double u2 = rng::uniform(seed, i, kStreamInit, attempt, 2);
                double x[2] = {u0 * g.length, u1 * g.length};
                if (u2 * vmax <= std::max(0.0, interp(dens, g, x))) {
                    e.pos[i * 2] = x[0];
                    e.pos[i * 2 + 1] = x[1];
                    break;
                }
                if (attempt > 10000)
                    throw std::runtime_error("sample_initial_positions: rejection stalled");
            }
        });
    }
    return e;
}

McKeanRun simulate_mckean(const TimeField& b, int n_mollify, const SpectralField& K,
                          const Nonlinearity& F, const SpectralField& v0, int n_particles,
                          double h, double T, std::uint64_t seed, const McKeanOptions& opts) {
    b.validate();
    if (n_mollify < 1) throw std::invalid_argument("simulate_mckean: mollification level >= 1 required");
    if (!(h > 0) || !(T > 0)) throw std::invalid_argument("simulate_mckean: bad step or horizon");
    const Grid& g = v0.grid();

    TimeField bn = mollify(b, n_mollify);
    McKeanRun run;
    run.mollify_n = n_mollify;

    // Resolution warning: h against the drift's Lipschitz scale.
    double grad_sup = 0.0;
    {
        SpectralField comp(g, 1);
        for (int c = 0; c < g.dim; ++c) {
            for (std::size_t m = 0; m < g.total(); ++m) comp.coef(0, m) = bn.snaps.front().coef(c, m);
            SpectralField gr = gradient(comp);
            for (int a = 0; a < g.dim; ++a) grad_sup = std::max(grad_sup, max_abs(gr, a));
        }
    }
    if (h * grad_sup > 0.5) run.lipschitz_warning = true;

    ParticleEnsemble e = sample_initial_positions(v0, n_particles, seed);
    int n_steps = static_cast<int>(std::llround(T / h));
    if (n_steps < 1) n_steps = 1;
    run.steps = n_steps;
    const double sqrt_h = std::sqrt(h);

    if (opts.snapshot_every > 0) {
        run.snapshot_times.push_back(0.0);
        run.snapshots.push_back(e);
    }

    for (int step = 0; step < n_steps; ++step) {
        double t = step * h;
        SpectralField mu = deposit_density(e, g);
        if (std::abs(integral(mu) - 1.0) > 1e-10)
            throw std::runtime_error("simulate_mckean: deposited mass drifted from 1");
        SpectralField conv = convolve(K, mu);
        auto conv_phys = to_physical(conv);
        auto b_phys = physical_at_time(bn, std::min(t, bn.horizon()));

        std::vector<std::uint8_t> blown(static_cast<std::size_t>(n_particles), 0);
        parallel_for(static_cast<std::size_t>(n_particles), [&](std::size_t i) {
            double x[2] = {e.coord(static_cast<int>(i), 0),
                           g.dim == 2 ? e.coord(static_cast<int>(i), 1) : 0.0};
            double fval = F(interp(conv_phys, g, x));
            double z0, z1;
            rng::normal_pair(seed, i, static_cast<std::uint64_t>(step), kStreamStep, 0, z0, z1);
            double zs[2] = {z0, z1};
            for (int a = 0; a < g.dim; ++a) {
                double drift = fval * interp(b_phys[a], g, x) * h;
                if (std::abs(drift) > g.length / 4) { blown[i] = 1; return; }
                double nx = e.pos[i * g.dim + a] + drift + sqrt_h * zs[a];
                e.pos[i * g.dim + a] = wrap(nx, g.length);
            }
        });
        for (std::size_t i = 0; i < blown.size(); ++i)
            if (blown[i]) {
                std::ostringstream os;
                os << "simulate_mckean: drift step exceeded L/4 at step " << step << ", particle "
                   << i << " (t = " << t << "); reduce h or increase mollification";
                throw std::runtime_error(os.str());
            }
        if (opts.snapshot_every > 0 &&
            ((step + 1) % opts.snapshot_every == 0 || step + 1 == n_steps)) {
            run.snapshot_times.push_back((step + 1) * h);
            run.snapshots.push_back(e);
        }
    }
    run.ensemble = std::move(e);
    return run;
}

std::vector<FkEstimate> feynman_kac_solve(const TimeField& h_field, const SpectralField& eta0,
                                          double probe_time_s,
                                          const std::vector<std::vector<double>>& probe_points,
                                          int m_paths, double dt, std::uint64_t seed) {
    h_field.validate();
    if (m_paths < 10000) throw std::invalid_argument("feynman_kac_solve: need at least 1e4 paths");
    const Grid& g = eta0.grid();
    const double T = h_field.horizon();
    if (!(probe_time_s > 0) || probe_time_s > T + 1e-12)
        throw std::invalid_argument("feynman_kac_solve: probe time outside (0, T]");

    // div h per snapshot, shared across probes.
    TimeField div_h;
    div_h.times = h_field.times;
    div_h.snaps.reserve(h_field.snaps.size());
    for (const auto& s : h_field.snaps) div_h.snaps.push_back(divergence(s));

    auto eta0_fine = to_physical(resample(eta0, 4 * g.modes));
    Grid fine{g.dim, 4 * g.modes, g.length};

    int n_steps = std::max(1, static_cast<int>(std::ceil(probe_time_s / dt)));
    double dte = probe_time_s / n_steps;
    double t0 = T - probe_time_s;

    std::vector<FkEstimate> out;
    for (std::size_t pi = 0; pi < probe_points.size(); ++pi) {
        const auto& probe = probe_points[pi];
        if (static_cast<int>(probe.size()) != g.dim)
            throw std::invalid_argument("feynman_kac_solve: probe dimension mismatch");

        std::vector<double> ypos(static_cast<std::size_t>(m_paths) * g.dim);
        std::vector<double> logw(static_cast<std::size_t>(m_paths), 0.0);
        for (int i = 0; i < m_paths; ++i)
            for (int a = 0; a < g.dim; ++a) ypos[static_cast<std::size_t>(i) * g.dim + a] = probe[a];

        for (int q = 0; q < n_steps; ++q) {
            double t = t0 + q * dte;                 // time on the reversed clock
            double tf = std::clamp(T - t, 0.0, T);   // matching forward time
            auto hp = physical_at_time(h_field, tf);
            auto dv = physical_at_time(div_h, tf);
            parallel_for(static_cast<std::size_t>(m_paths), [&](std::size_t i) {
                double x[2] = {ypos[i * g.dim], g.dim == 2 ? ypos[i * g.dim + 1] : 0.0};
                logw[i] += -interp(dv[0], g, x) * dte;
                double z0, z1;
                rng::normal_pair(seed, i, static_cast<std::uint64_t>(q),
                                 kStreamFk + (pi << 8), 0, z0, z1);
                double zs[2] = {z0, z1};
                for (int a = 0; a < g.dim; ++a) {
                    double ny = ypos[i * g.dim + a] - interp(hp[a], g, x) * dte +
                                std::sqrt(dte) * zs[a];
                    ypos[i * g.dim + a] = wrap(ny, g.length);
                }
            });
        }

        // Fixed-order chunked reduction of the weighted terminal values.
        const std::size_t n = static_cast<std::size_t>(m_paths);
        const std::size_t nchunks = chunk_count(n), cs = chunk_size(n);
        std::vector<double> psum(nchunks, 0.0), psq(nchunks, 0.0);
        parallel_chunks(n, [&](std::size_t lo, std::size_t hi) {
            double s = 0.0, s2 = 0.0;
            for (std::size_t i = lo; i < hi; ++i) {
                double x[2] = {ypos[i * g.dim], g.dim == 2 ? ypos[i * g.dim + 1] : 0.0};
                double xs[2] = {x[0], x[1]};
                double val = interp(eta0_fine, fine, xs) * std::exp(logw[i]);
                s += val;
                s2 += val * val;
            }
            psum[lo / cs] = s;
            psq[lo / cs] = s2;
        });
        double sum = 0.0, sq = 0.0;
        for (std::size_t c = 0; c < nchunks; ++c) { sum += psum[c]; sq += psq[c]; }
        FkEstimate est;
        est.value = sum / m_paths;
        double var = std::max(0.0, (sq - m_paths * est.value * est.value) / (m_paths - 1.0));
        est.std_error = std::sqrt(var / m_paths);
        out.push_back(est);
    }
    return out;
}

double evaluate_at(const SpectralField& f, const std::vector<double>& x, int comp) {
    const Grid& g = f.grid();
    if (static_cast<int>(x.size()) != g.dim)
        throw std::invalid_argument("evaluate_at: point dimension mismatch");
    std::complex<double> s = 0.0;
    int kv[2];
    for (std::size_t m = 0; m < f.modes_total(); ++m) {
        f.wavevector(m, kv);
        double phase = 0.0;
        for (int a = 0; a < g.dim; ++a) phase += g.xi(kv[a]) * x[a];
        s += f.coef(comp, m) * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    return s.real();
}

double l1_distance(const SpectralField& a, const SpectralField& b) {
    return l1_norm(a - b);
}

}  // namespace sfpe
