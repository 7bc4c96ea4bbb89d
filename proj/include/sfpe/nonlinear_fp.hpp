#pragma once

#include <string>
#include <vector>

#include "sfpe/linear_fp.hpp"
#include "sfpe/nonlinearity.hpp"

namespace sfpe {

struct NonlinearReport {
    int outer_iterates = 0;
    bool converged = false;
    double rho_outer = 0.0;
    bool rho_vacuous = false;  // e^{-rho T} underflows the distance
    double b_norm = 0.0;
    double cfk = 0.0;
    double c_used = 0.0;
    double M0_bound = 0.0;
    std::vector<double> d_rho_beta_history;
    std::vector<double> contraction_ratios;
    double inner_ratio_worst = 0.0;  // worst inner ratio from the third iterate on
    std::vector<double> ball_trace;  // max_t |v_k(t)|_beta per outer iterate
    bool s_l1_flag = false;          // an iterate left the unit L^1 ball
    double fixed_point_residual = 0.0;
    double uniqueness_probe = -1.0;  // filled by the two-guess experiment
    std::string failure_hint;
    std::string to_json() const;
};

// Linearised solution map: solve the linear PDE with g = F(K*w) b.
std::pair<TimeField, SolveReport> tau(const TimeField& w, const TimeField& b,
                                      const SpectralField& K, const Nonlinearity& F,
                                      const SpectralField& v0, const SolverConfig& cfg);

// M0(x) = c |v0|_beta E_{1-theta}(C_FK x T^{1-theta} Gamma(1-theta)).
double m0_bound(double b_norm, double v0_norm_beta, const SolverConfig& cfg, double c_measured,
                double cfk_measured);

// rho for the outer contraction, from the fixed-point estimate with ball
// radius M: (Gamma(1-theta) c C_FK |b| (6M + 2))^{1/(1-theta)}.
double choose_rho_outer(double m_ball, double cfk, double b_norm, double c_measured,
                        double alpha, double beta);

// Outer Picard iteration of tau, seeded at w^0(t) = P_t v0 unless an initial
// guess is supplied. v0 must be nonnegative with unit mass (1e-10).
std::pair<TimeField, NonlinearReport> solve_nonlinear(const TimeField& b, const SpectralField& K,
                                                      const Nonlinearity& F,
                                                      const SpectralField& v0,
                                                      const SolverConfig& cfg,
                                                      const TimeField* initial_guess = nullptr);

struct ContinuityReport {
    std::vector<int> levels;
    std::vector<double> drift_gap;     // |b - b_n|_{C_T C^-alpha}
    std::vector<double> solution_gap;  // |v - v_n|_{C_T C^beta}
    std::vector<double> ratios;
    double slope = 0.0;
    double r_squared = 0.0;
    double ell_measured = 0.0;  // largest ratio
    bool aborted = false;
    std::string to_json() const;
    std::string to_csv() const;
};

// Solves with b and with each mollification b_n, regressing the solution gap
// against the drift gap in log-log coordinates.
ContinuityReport drift_continuity_experiment(const TimeField& b, const SpectralField& K,
                                             const Nonlinearity& F, const SpectralField& v0,
                                             const SolverConfig& cfg,
                                             const std::vector<int>& levels = {4, 16, 64, 256});

}  // namespace sfpe
