#pragma once

// Independent finite-difference oracle for the d = 1 advection form
//   eta_t = 1/2 eta_xx - eta_x h - eta h_x,   periodic on [0, L),
// with a static coefficient h. Fourth-order central stencils in space and
// classical RK4 in time. Deliberately shares no code with the spectral path.

#include <cstddef>
#include <vector>

namespace fd {

inline std::vector<double> rhs(const std::vector<double>& eta, const std::vector<double>& h,
                               const std::vector<double>& hx, double dx) {
    const int n = static_cast<int>(eta.size());
    std::vector<double> out(n);
    auto at = [&](int i) { return eta[((i % n) + n) % n]; };
    const double inv12dx = 1.0 / (12.0 * dx);
    const double inv12dx2 = 1.0 / (12.0 * dx * dx);
    for (int i = 0; i < n; ++i) {
        double ex = (-at(i + 2) + 8 * at(i + 1) - 8 * at(i - 1) + at(i - 2)) * inv12dx;
        double exx =
            (-at(i + 2) + 16 * at(i + 1) - 30 * at(i) + 16 * at(i - 1) - at(i - 2)) * inv12dx2;
        out[i] = 0.5 * exx - ex * h[i] - eta[i] * hx[i];
    }
    return out;
}

inline std::vector<double> solve(std::vector<double> eta, const std::vector<double>& h,
                                 const std::vector<double>& hx, double L, double T, int steps) {
    const double dx = L / static_cast<double>(eta.size());
    const double dt = T / steps;
    std::vector<double> k1, k2, k3, k4, tmp(eta.size());
    for (int s = 0; s < steps; ++s) {
        k1 = rhs(eta, h, hx, dx);
        for (std::size_t i = 0; i < eta.size(); ++i) tmp[i] = eta[i] + 0.5 * dt * k1[i];
        k2 = rhs(tmp, h, hx, dx);
        for (std::size_t i = 0; i < eta.size(); ++i) tmp[i] = eta[i] + 0.5 * dt * k2[i];
        k3 = rhs(tmp, h, hx, dx);
        for (std::size_t i = 0; i < eta.size(); ++i) tmp[i] = eta[i] + dt * k3[i];
        k4 = rhs(tmp, h, hx, dx);
        for (std::size_t i = 0; i < eta.size(); ++i)
            eta[i] += dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    }
    return eta;
}

}  // namespace fd
