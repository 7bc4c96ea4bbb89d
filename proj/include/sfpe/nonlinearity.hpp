#pragma once

#include <string>
#include <vector>

#include "sfpe/spectral_field.hpp"

namespace sfpe {

// C^1 nonlinearity with bounded, Lipschitz derivative. The recorded
// envelope constants (F(0), sup |F'|, Lip(F')) are part of the contract and
// validated against finite differences on [-10, 10].
class Nonlinearity {
  public:
    enum class Family { Constant, ScaledTanh, SmoothClamp };

    static Nonlinearity constant(double lambda);
    // F(x) = b0 tanh(a x)
    static Nonlinearity scaled_tanh(double a, double b0);
    // F(x) = level * (x/scale) / sqrt(1 + (x/scale)^2)
    static Nonlinearity smooth_clamp(double scale, double level);

    double operator()(double x) const;
    double derivative(double x) const;

    Family family() const { return family_; }
    bool is_constant() const { return family_ == Family::Constant; }
    double constant_value() const { return p0_; }
    double f_at_zero() const { return f0_; }
    double f_prime_sup() const { return fp_sup_; }
    double f_prime_lipschitz() const { return fp_lip_; }
    std::string name() const;

    // Finite-difference probe of sup |F'| and Lip(F') on [-10, 10]; throws if
    // the recorded constants fail to dominate the estimates within 5%.
    void validate_recorded() const;

  private:
    Family family_ = Family::Constant;
    double p0_ = 0.0, p1_ = 0.0;
    double f0_ = 0.0, fp_sup_ = 0.0, fp_lip_ = 0.0;
};

// F((K*f)(x)) evaluated pointwise on the dealiasing grid, truncated back.
SpectralField apply_F_of_convolution(const SpectralField& f, const SpectralField& K,
                                     const Nonlinearity& F);

// phi(f) = f F(K*f); one padded physical pass. Constant F returns
// lambda * f exactly.
SpectralField phi(const SpectralField& f, const SpectralField& K, const Nonlinearity& F);

// g_w(t) = F(K*w(t)) b(t), snapshot-wise.
TimeField assemble_gw(const TimeField& w, const TimeField& b, const SpectralField& K,
                      const Nonlinearity& F);

// Measured constant |F(0)| + sup|F'| * |K|_{C^gamma}, the Holder-norm flavor
// entering the a-priori bounds; the kernel norms come from the field.
double measured_cfk(const SpectralField& K, const Nonlinearity& F, double gamma);
// The L^1 flavor |F(0)| + sup|F'| * |K|_inf.
double measured_cfk_l1(const SpectralField& K, const Nonlinearity& F);

struct PhiBoundsReport {
    double gamma = 0.0;
    double growth_ratio = 0.0;      // |phi f| / (|f|(1 + |f|_L1))
    double lipschitz_ratio = 0.0;   // |phi f - phi g| / ((1+|f|+|g|)(1+|f+g|_L1)|f-g|)
    double conv_lipschitz_ratio = 0.0;  // |F(K*f)-F(K*g)| / ((1+|f+g|_L1)|f-g|)
    int pairs = 0;
    int skipped_degenerate = 0;
    std::string to_json() const;
    std::string csv_row() const;
    static std::string csv_header();
};

PhiBoundsReport phi_bounds_report(const std::vector<SpectralField>& f_ensemble,
                                  const std::vector<SpectralField>& g_ensemble,
                                  const SpectralField& K, const Nonlinearity& F, double gamma);

}  // namespace sfpe
