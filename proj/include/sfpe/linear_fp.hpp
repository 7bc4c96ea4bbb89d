#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfpe/spectral_field.hpp"

namespace sfpe {

// Exponents and controls for the Picard solver of the mild formulation
// v(t) = P_t v0 - int_0^t P_{t-s} div(v(s) g(s)) ds.
struct SolverConfig {
    double alpha = 0.25;
    double beta = 0.3;
    double T = 0.5;
    int time_steps = 256;
    double rho = -1.0;        // < 0: choose from the contraction formula
    double picard_tol = 1e-9;
    int max_picard_iters = 200;
    double bony_c = -1.0;     // < 0: measure the Bony/Bernstein/Schauder aggregate
    double outer_tol = 1e-7;
    int max_outer_iters = 30;
    std::uint64_t measure_seed = 0xC0FFEE;

    double theta() const { return 0.5 * (alpha + beta + 1.0); }
    void validate() const;  // enforces 0 < alpha < beta < 1/2
};

struct SolveReport {
    int iterates = 0;
    bool converged = false;
    double rho_used = 0.0;
    double g_norm = 0.0;      // measured |g|_{C_T C^-alpha}
    double c_used = 0.0;      // contraction aggregate fed to the rho formula
    std::vector<double> residual_history;     // d_{rho,beta} between iterates
    std::vector<double> contraction_ratios;
    std::vector<double> mass_trace;
    std::vector<double> min_value_trace;
    bool non_contraction_flag = false;  // residuals rose below the 1e-2 gate
    std::string to_json() const;
};

struct MassReport {
    std::vector<double> times;
    std::vector<double> mass;
    std::vector<double> min_value;
    std::vector<double> max_value;
    bool mass_flag = false;        // some mass exceeds 1 + 1e-6
    bool positivity_flag = false;  // some min below -1e-6 * max
    std::string to_csv() const;
};

// rho with |g| c rho^{theta-1} Gamma(1-theta) = 1/2.
double choose_rho(double g_norm, double alpha, double beta, double c_measured);

// Measured aggregate of the constants chained in the contraction estimate:
// Bony product at (beta, -alpha), spectral divergence loss -alpha -> -alpha-1,
// and the Schauder factor t^theta |P_t .|_beta / |.|_{-alpha-1}.
double measure_contraction_aggregate(const Grid& g, double alpha, double beta, std::uint64_t seed);

// Exact per-mode exponential integration of int_0^t P_{t-s} h(s) ds with h
// piecewise linear on the time grid. Scalar h.
SpectralField duhamel_integral(const TimeField& h, int t_index);
TimeField duhamel_sweep(const TimeField& h);

// Picard solver for the linear Fokker-Planck PDE with frozen drift g
// (vector-valued TimeField). v0 must carry mass at most 1 + 1e-10.
std::pair<TimeField, SolveReport> solve_linear(const TimeField& g, const SpectralField& v0,
                                               const SolverConfig& cfg);

// Default bank of smooth periodic test functions (low modes and a bump).
std::vector<SpectralField> default_test_bank(const Grid& g);

// Largest normalized residual of the weak formulation over bank and time.
double weak_residual(const TimeField& v, const TimeField& g, const SpectralField& v0,
                     const std::vector<SpectralField>& test_bank);

MassReport positivity_mass_report(const TimeField& v);

}  // namespace sfpe
