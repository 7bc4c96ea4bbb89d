#include "sfpe/nonlinearity.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "sfpe/besov.hpp"
#include "sfpe/paraproduct.hpp"

namespace sfpe {

Nonlinearity Nonlinearity::constant(double lambda) {
    Nonlinearity F;
    F.family_ = Family::Constant;
    F.p0_ = lambda;
    F.f0_ = lambda;
    F.fp_sup_ = 0.0;
    F.fp_lip_ = 0.0;
    return F;
}

Nonlinearity Nonlinearity::scaled_tanh(double a, double b0) {
    Nonlinearity F;
    F.family_ = Family::ScaledTanh;
    F.p0_ = a;
    F.p1_ = b0;
    F.f0_ = 0.0;
    F.fp_sup_ = std::abs(a * b0);
    // sup |F''| = 4 a^2 |b0| / (3 sqrt(3)), attained at tanh^2 = 1/3.
    F.fp_lip_ = 4.0 * a * a * std::abs(b0) / (3.0 * std::sqrt(3.0));
    return F;
}

Nonlinearity Nonlinearity::smooth_clamp(double scale, double level) {
    if (!(scale > 0)) throw std::invalid_argument("smooth_clamp: scale must be positive");
    Nonlinearity F;
    F.family_ = Family::SmoothClamp;
    F.p0_ = scale;
    F.p1_ = level;
    F.f0_ = 0.0;
    F.fp_sup_ = std::abs(level) / scale;
    // sup |F''| = 3 |level| u (1+u^2)^{-5/2} / scale^2 at u = 1/2.
    F.fp_lip_ = 1.5 * std::abs(level) / (scale * scale) * std::pow(1.25, -2.5);
    return F;
}

double Nonlinearity::operator()(double x) const {
    switch (family_) {
        case Family::Constant: return p0_;
        case Family::ScaledTanh: return p1_ * std::tanh(p0_ * x);
        case Family::SmoothClamp: {
            double u = x / p0_;
            return p1_ * u / std::sqrt(1.0 + u * u);
        }
    }
    return 0.0;
}

double Nonlinearity::derivative(double x) const {
    switch (family_) {
        case Family::Constant: return 0.0;
        case Family::ScaledTanh: {
            double t = std::tanh(p0_ * x);
            return p1_ * p0_ * (1.0 - t * t);
        }
        case Family::SmoothClamp: {
            double u = x / p0_;
            return p1_ / p0_ * std::pow(1.0 + u * u, -1.5);
        }
    }
    return 0.0;
}

std::string Nonlinearity::name() const {
    switch (family_) {
        case Family::Constant: return "constant";
        case Family::ScaledTanh: return "tanh";
        case Family::SmoothClamp: return "smooth_clamp";
    }
    return "?";
}

void Nonlinearity::validate_recorded() const {
    const int n = 20000;
    const double lo = -10.0, hi = 10.0, h = (hi - lo) / n;
    double sup_fd = 0.0, lip_fd = 0.0, prev = 0.0;
    for (int i = 0; i <= n; ++i) {
        double x = lo + i * h;
        double d = ((*this)(x + 0.5 * h) - (*this)(x - 0.5 * h)) / h;
        sup_fd = std::max(sup_fd, std::abs(d));
        if (i > 0) lip_fd = std::max(lip_fd, std::abs(d - prev) / h);
        prev = d;
    }
    auto dominates = [](double recorded, double estimate) {
        return recorded >= estimate * (1.0 - 1e-9) && recorded <= estimate * 1.05 + 1e-12;
    };
    if (!dominates(fp_sup_, sup_fd))
        throw std::logic_error("nonlinearity: recorded sup|F'| does not dominate FD estimate within 5%");
    if (!dominates(fp_lip_, lip_fd))
        throw std::logic_error("nonlinearity: recorded Lip(F') does not dominate FD estimate within 5%");
}

namespace {

void check_kernel(const SpectralField& K) {
    double mass = K.grid().volume() * K.coef(0, 0).real();
    if (std::abs(mass - 1.0) > 1e-8) {
        std::ostringstream os;
        os << "nonlinearity: kernel not normalized, integral = " << mass;
        throw std::invalid_argument(os.str());
    }
}

}  // namespace

SpectralField apply_F_of_convolution(const SpectralField& f, const SpectralField& K,
                                     const Nonlinearity& F) {
    if (f.components() != 1) throw std::invalid_argument("apply_F_of_convolution: scalar field expected");
    check_kernel(K);
    if (F.is_constant()) {
        SpectralField out(f.grid(), 1);
        out.coef(0, 0) = F.constant_value();
        return out;
    }
    SpectralField u = convolve(K, f);
    int big = 3 * f.grid().modes / 2;
    SpectralField up = resample(u, big);
    auto uv = to_physical(up);
    for (double& x : uv) x = F(x);
    return resample(from_physical(up.grid(), uv), f.grid().modes);
}

SpectralField phi(const SpectralField& f, const SpectralField& K, const Nonlinearity& F) {
    if (f.components() != 1) throw std::invalid_argument("phi: scalar field expected");
    check_kernel(K);
    if (F.is_constant()) {
        SpectralField out = f;
        out *= F.constant_value();
        return out;
    }
    SpectralField u = convolve(K, f);
    int big = 3 * f.grid().modes / 2;
    SpectralField fp = resample(f, big), up = resample(u, big);
    auto fv = to_physical(fp);
    auto uv = to_physical(up);
    for (std::size_t i = 0; i < fv.size(); ++i) fv[i] *= F(uv[i]);
    return resample(from_physical(fp.grid(), fv), f.grid().modes);
}

TimeField assemble_gw(const TimeField& w, const TimeField& b, const SpectralField& K,
                      const Nonlinearity& F) {
    w.validate();
    b.validate();
    if (w.times != b.times) throw std::invalid_argument("assemble_gw: time grids differ");
    if (!(w.snaps.front().grid() == b.snaps.front().grid()))
        throw std::invalid_argument("assemble_gw: spatial grids differ");
    TimeField g;
    g.times = b.times;
    g.snaps.resize(b.snaps.size());
    if (F.is_constant()) {
        for (std::size_t i = 0; i < b.snaps.size(); ++i) {
            g.snaps[i] = b.snaps[i];
            g.snaps[i] *= F.constant_value();
        }
        return g;
    }
    for (std::size_t i = 0; i < b.snaps.size(); ++i) {
        SpectralField s = apply_F_of_convolution(w.snaps[i], K, F);
        g.snaps[i] = pointwise_product_vector(s, b.snaps[i]);
    }
    return g;
}

double measured_cfk(const SpectralField& K, const Nonlinearity& F, double gamma) {
    NormReport h = holder_norm(K, gamma);
    return std::abs(F.f_at_zero()) + F.f_prime_sup() * (h.holder_sup + h.holder_seminorm);
}

double measured_cfk_l1(const SpectralField& K, const Nonlinearity& F) {
    return std::abs(F.f_at_zero()) + F.f_prime_sup() * max_abs(K);
}

PhiBoundsReport phi_bounds_report(const std::vector<SpectralField>& f_ensemble,
                                  const std::vector<SpectralField>& g_ensemble,
                                  const SpectralField& K, const Nonlinearity& F, double gamma) {
    if (!(gamma > 0 && gamma < 1)) throw std::invalid_argument("phi_bounds_report: gamma in (0,1)");
    if (f_ensemble.empty() || f_ensemble.size() != g_ensemble.size())
        throw std::invalid_argument("phi_bounds_report: ensembles must be nonempty and paired");
    PhiBoundsReport rep;
    rep.gamma = gamma;
    for (std::size_t i = 0; i < f_ensemble.size(); ++i) {
        const auto& f = f_ensemble[i];
        const auto& g = g_ensemble[i];
        double nf = besov_norm_value(f, gamma), ng = besov_norm_value(g, gamma);
        double l1f = l1_norm(f), l1sum = l1_norm(f + g);
        double nd = besov_norm_value(f - g, gamma);
        if (nf > 0)
            rep.growth_ratio = std::max(
                rep.growth_ratio, besov_norm_value(phi(f, K, F), gamma) / (nf * (1.0 + l1f)));
        if (nd <= 1e-14 * std::max(nf, ng)) {
            ++rep.skipped_degenerate;
            continue;
        }
        double dphi = besov_norm_value(phi(f, K, F) - phi(g, K, F), gamma);
        rep.lipschitz_ratio = std::max(
            rep.lipschitz_ratio, dphi / ((1.0 + nf + ng) * (1.0 + l1sum) * nd));
        double dF = besov_norm_value(
            apply_F_of_convolution(f, K, F) - apply_F_of_convolution(g, K, F), gamma);
        rep.conv_lipschitz_ratio =
            std::max(rep.conv_lipschitz_ratio, dF / ((1.0 + l1sum) * nd));
        ++rep.pairs;
    }
    return rep;
}

std::string PhiBoundsReport::csv_header() {
    return "gamma,growth_ratio,lipschitz_ratio,conv_lipschitz_ratio,pairs,skipped";
}

std::string PhiBoundsReport::csv_row() const {
    std::ostringstream os;
    os.precision(12);
    os << gamma << "," << growth_ratio << "," << lipschitz_ratio << "," << conv_lipschitz_ratio
       << "," << pairs << "," << skipped_degenerate;
    return os.str();
}

std::string PhiBoundsReport::to_json() const {
    nlohmann::json j;
    j["gamma"] = gamma;
    j["growth_ratio"] = growth_ratio;
    j["lipschitz_ratio"] = lipschitz_ratio;
    j["conv_lipschitz_ratio"] = conv_lipschitz_ratio;
    j["pairs"] = pairs;
    j["skipped_degenerate"] = skipped_degenerate;
    return j.dump(2);
}

}  // namespace sfpe
