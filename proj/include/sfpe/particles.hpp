#pragma once

#include <cstdint>
#include <vector>

#include "sfpe/nonlinearity.hpp"
#include "sfpe/spectral_field.hpp"

namespace sfpe {

// N particle positions on the torus, noise keyed by (seed, particle, step)
// so trajectories are bitwise reproducible at any thread count.
struct ParticleEnsemble {
    int dim = 1;
    double length = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> pos;  // size() * dim, row-major per particle

    int size() const { return dim == 0 ? 0 : static_cast<int>(pos.size()) / dim; }
    double coord(int i, int axis) const { return pos[static_cast<std::size_t>(i) * dim + axis]; }
};

// Cloud-in-cell deposit of the empirical measure; integrates to 1 (1e-10).
// Chunked fixed-order reduction keeps the sum deterministic.
SpectralField deposit_density(const ParticleEnsemble& e, const Grid& g);

// (K * mu^N)(x) evaluated spectrally on the grid.
SpectralField empirical_convolution(const SpectralField& K, const ParticleEnsemble& e,
                                    const Grid& g);

// Periodized-Gaussian KDE of the ensemble; bandwidth must span >= 2 cells.
SpectralField density_estimate(const ParticleEnsemble& e, double bandwidth, const Grid& g);

// Samples initial positions from a density: inverse CDF through a 4096-point
// cumulative table in d=1,02 rejection sampling in d=2.
ParticleEnsemble sample_initial_positions(const SpectralField& v0, int n_particles,
                                          std::uint64_t seed);

struct McKeanOptions {
    int snapshot_every = 0;  // 0: keep only the terminal ensemble
};

struct McKeanRun {
    ParticleEnsemble ensemble;
    std::vector<double> snapshot_times;
    std::vector<ParticleEnsemble> snapshots;
    int steps = 0;
    int mollify_n = 0;
    bool lipschitz_warning = false;  // h sup|grad b_n| exceeded 0.5
};

// Euler-Maruyama on dX = F((K*mu^N)(X)) b_n(t, X) dt + dW with the drift
// mollified at level n_mollify and refreshed empirical convolution each step.
// Aborts with diagnostics if any drift step exceeds L/4.
McKeanRun simulate_mckean(const TimeField& b, int n_mollify, const SpectralField& K,
                          const Nonlinearity& F, const SpectralField& v0, int n_particles,
                          double h, double T, std::uint64_t seed, const McKeanOptions& opts = {});

struct FkEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

// Monte Carlo evaluation of the linear Fokker-Planck solution at time s and
// the probe points, through the time-reversed flow dY = -h(T-t, Y) dt + dW
// weighted by exp(-int div h). h_field must be genuinely smooth.
std::vector<FkEstimate> feynman_kac_solve(const TimeField& h_field, const SpectralField& eta0,
                                          double probe_time_s,
                                          const std::vector<std::vector<double>>& probe_points,
                                          int m_paths, double dt, std::uint64_t seed);

// Exact trigonometric evaluation of a field component at a point.
double evaluate_at(const SpectralField& f, const std::vector<double>& x, int comp = 0);

// L^1 distance between two scalar fields, quadrature on a 2x padded grid.
double l1_distance(const SpectralField& a, const SpectralField& b);

}  // namespace sfpe
