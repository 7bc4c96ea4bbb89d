#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfpe/spectral_field.hpp"

namespace sfpe {

// Pointwise product of a smooth factor with a distribution-role factor,
// realized as the exact dealiased product of trigonometric polynomials.
SpectralField pointwise_product(const SpectralField& f, const SpectralField& g);

// Scalar times vector field, component-wise dealiased product.
SpectralField pointwise_product_vector(const SpectralField& scalar, const SpectralField& vec);

// Measured constant for |fg|_{-alpha} <= c |f|_gamma |g|_{-alpha}.
// Requires gamma > alpha > 0 (the product is ill-posed otherwise).
struct BonyReport {
    double gamma = 0.0;
    double alpha = 0.0;
    int modes = 0;
    double c_measured = 0.0;   // sup of the ratio over the ensemble
    double c_mean = 0.0;
    int ensemble_size = 0;
    std::uint64_t seed = 0;
    std::string csv_row() const;  // gamma,alpha,N,c_measured,ensemble_size,seed
    static std::string csv_header();
};

BonyReport bony_constant(const std::vector<SpectralField>& f_ensemble,
                         const std::vector<SpectralField>& g_ensemble, double gamma, double alpha,
                         std::uint64_t seed = 0);

// Relative deviation |(G l1) l2 - G (l1 l2)|_{-alpha} / (|G| |l1| |l2|),
// evaluated at 4x upsampled resolution where no truncation engages, so the
// two association orders agree to rounding.
double associativity_check(const SpectralField& Gamma, const SpectralField& l1,
                           const SpectralField& l2, double alpha, double beta);

}  // namespace sfpe
