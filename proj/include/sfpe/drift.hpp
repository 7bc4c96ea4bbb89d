#pragma once

#include <cstdint>
#include <vector>

#include "sfpe/spectral_field.hpp"

namespace sfpe {

// Recipe for a random drift of target space regularity -beta: independent
// complex Gaussian coefficients with standard deviation
// amplitude * |k|^{-(d/2 - beta) - epsilon_reg}, Hermitian-symmetrized.
// Draws are keyed by (seed, component, wavevector), so refining the grid
// keeps every shared mode bit-identical.
struct DriftSpec {
    double beta = 0.3;
    double epsilon_reg = 0.05;
    std::uint64_t seed = 1;
    enum class TimeProfile { Static, SmoothModulated } profile = TimeProfile::Static;
    double amplitude = 1.0;

    void validate() const;
};

// Gaussian spectral synthesis of one scalar sample with block-sup decay
// targeting regularity `gamma` (margin eps included by the caller in gamma).
SpectralField sample_random_field(const Grid& g, std::uint64_t seed, double gamma,
                                  double amplitude = 1.0, std::uint64_t stream = 0);

// d-component drift on the given time grid. Static profile repeats one
// sample; SmoothModulated scales it by a(t) = 1 + sin(2 pi t / T) / 2.
TimeField sample_drift(const DriftSpec& spec, const Grid& g, const std::vector<double>& times);

// Heat-kernel mollification g_n = p_{1/n} * g: multiplier exp(-|xi|^2/(2n)).
SpectralField mollify(const SpectralField& f, int n);
TimeField mollify(const TimeField& f, int n);

// Steep spectral rolloff exp(-(|k| / (start * N/2))^power) on the top octave.
// Softens the hard band edge of sampled drifts whose truncation ripple would
// otherwise dominate positivity studies; levels below start * N/2 are left
// numerically untouched, so regularity certificates are unaffected.
void apply_band_taper(SpectralField& f, double start_fraction = 0.8, double power = 16.0);
void apply_band_taper(TimeField& f, double start_fraction = 0.8, double power = 16.0);

// Mixture-of-bumps initial density; widths must resolve on the grid.
struct InitialDensitySpec {
    struct Bump {
        std::vector<double> center;  // one entry per axis
        double width = 1.0;
        double weight = 1.0;
    };
    std::vector<Bump> bumps;
};

// Periodized Gaussian probability density, exactly unit mass, centered at
// `center` (defaults to 0 so convolution does not translate). Rejects sigma
// under min_cells_per_sigma grid cells.
SpectralField make_kernel(const Grid& g, double sigma, const std::vector<double>& center = {},
                          int min_cells_per_sigma = 8);

SpectralField make_initial_density(const InitialDensitySpec& spec, const Grid& g);

}  // namespace sfpe
