#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfpe/spectral_field.hpp"

namespace sfpe {

// Sharp Littlewood-Paley partition over integer wavenumbers: block -1 holds
// k = 0, block j >= 1 the annulus 2^{j-1} <= |k| < 2^j. Block 0 is empty on
// an integer lattice and kept for uniform indexing. The partition runs to
// top_level = log2(N/2)+1 so every resolved mode lands in exactly one block;
// levels above trusted_level_J sit against the truncation edge and are
// excluded from slope fits and cross-resolution comparisons.
struct BesovParams {
    double gamma = 0.0;
    int trusted_level_J = 0;  // log2(N/2) - 1
    int top_level = 0;        // log2(N/2) + 1
};

BesovParams besov_params(const Grid& g, double gamma);

// Level of |k| (Euclidean modulus of the integer wavevector).
int block_level(double k_abs);

struct NormReport {
    double besov_norm = 0.0;
    std::vector<double> per_level;  // index j+1 <-> level j, weighted values
    double holder_sup = 0.0;
    double holder_seminorm = 0.0;
    double gamma = 0.0;
    double rho = 0.0;
    std::string to_json() const;
};

// Annulus projection; j in [-1, top_level].
SpectralField dyadic_block(const SpectralField& f, int j);

// Sup of |block j| evaluated on a level-keyed oversampled grid
// (8 * 2^j points per axis, floor 32, cap 4N) so values at shared levels do
// not depend on the ambient resolution. Vector fields: max over components.
double block_sup(const SpectralField& f, int j);

// sup_j w_j(gamma) * block_sup, w_j = 2^{j gamma} for j >= 0 and 1 at j = -1.
NormReport besov_norm(const SpectralField& f, double gamma);
double besov_norm_value(const SpectralField& f, double gamma);

// Holder-Zygmund norm for gamma in (0,1): grid sup plus brute-force pair
// seminorm with torus distance. Exhaustive when the grid has at most 512
// points, otherwise 10^6 seeded pairs.
NormReport holder_norm(const SpectralField& f, double gamma, std::uint64_t pair_seed = 0x5f3e);

// Exponentially weighted time norms of Definition-style sup_t e^{-rho t}|.|.
double rho_norm(const TimeField& v, double rho, double gamma);
double rho_distance(const TimeField& v, const TimeField& w, double rho, double gamma);

// Least-squares slope fit of log2 block sups against the level over trusted
// levels; returns the estimated regularity exponent (= -slope).
struct RegularityFit {
    double gamma_hat = 0.0;
    double slope = 0.0;
    double r_squared = 0.0;
    std::vector<int> levels;
    std::vector<double> log2_sups;
};
RegularityFit estimate_regularity(const SpectralField& f, int min_level = 2);

// Measured semigroup constants over an ensemble and a time grid:
//   smoothing = sup t^theta |P_t f|_{2 theta + gamma} / |f|_gamma
//   approach  = sup t^{-theta} |P_t f - f|_gamma / |f|_{2 theta + gamma}
struct SchauderReport {
    double smoothing_constant = 0.0;
    double approach_constant = 0.0;
    double theta = 0.0;
    double gamma = 0.0;
    int ensemble_size = 0;
};
SchauderReport schauder_constants(const std::vector<SpectralField>& ensemble, double gamma,
                                  double theta, const std::vector<double>& t_grid);

// Simple least squares on (x, y); used by the regression-style oracles.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace sfpe
