#include "sfpe/paraproduct.hpp"

#include <sstream>
#include <stdexcept>

#include "sfpe/besov.hpp"

namespace sfpe {

SpectralField pointwise_product(const SpectralField& f, const SpectralField& g) {
    return multiply_dealiased(f, g);
}

SpectralField pointwise_product_vector(const SpectralField& scalar, const SpectralField& vec) {
    if (scalar.components() != 1) throw std::invalid_argument("pointwise_product_vector: scalar first");
    if (!(scalar.grid() == vec.grid())) throw std::invalid_argument("pointwise_product_vector: grid mismatch");
    SpectralField out(vec.grid(), vec.components());
    SpectralField comp(vec.grid(), 1);
    for (int c = 0; c < vec.components(); ++c) {
        for (std::size_t m = 0; m < vec.modes_total(); ++m) comp.coef(0, m) = vec.coef(c, m);
        SpectralField p = multiply_dealiased(scalar, comp);
        for (std::size_t m = 0; m < vec.modes_total(); ++m) out.coef(c, m) = p.coef(0, m);
    }
    return out;
}

BonyReport bony_constant(const std::vector<SpectralField>& f_ensemble,
                         const std::vector<SpectralField>& g_ensemble, double gamma, double alpha,
                         std::uint64_t seed) {
    if (!(gamma > alpha && alpha > 0))
        throw std::invalid_argument("bony_constant: requires gamma > alpha > 0");
    if (f_ensemble.empty() || g_ensemble.empty() || f_ensemble.size() != g_ensemble.size())
        throw std::invalid_argument("bony_constant: ensembles must be nonempty and paired");
    BonyReport rep;
    rep.gamma = gamma;
    rep.alpha = alpha;
    rep.modes = f_ensemble.front().grid().modes;
    rep.ensemble_size = static_cast<int>(f_ensemble.size());
    rep.seed = seed;
    double sum = 0.0;
    int counted = 0;
    for (std::size_t i = 0; i < f_ensemble.size(); ++i) {
        double nf = besov_norm_value(f_ensemble[i], gamma);
        double ng = besov_norm_value(g_ensemble[i], -alpha);
        if (nf <= 0 || ng <= 0) continue;
        double np = besov_norm_value(pointwise_product(f_ensemble[i], g_ensemble[i]), -alpha);
        double ratio = np / (nf * ng);
        rep.c_measured = std::max(rep.c_measured, ratio);
        sum += ratio;
        ++counted;
    }
    rep.c_mean = counted ? sum / counted : 0.0;
    return rep;
}

std::string BonyReport::csv_header() { return "gamma,alpha,N,c_measured,ensemble_size,seed"; }

std::string BonyReport::csv_row() const {
    std::ostringstream os;
    os.precision(12);
    os << gamma << "," << alpha << "," << modes << "," << c_measured << "," << ensemble_size << ","
       << seed;
    return os.str();
}

double associativity_check(const SpectralField& Gamma, const SpectralField& l1,
                           const SpectralField& l2, double alpha, double beta) {
    if (!(alpha < beta)) throw std::invalid_argument("associativity_check: requires alpha < beta");
    int big = 4 * Gamma.grid().modes;
    SpectralField G = resample(Gamma, big), a = resample(l1, big), b = resample(l2, big);
    SpectralField left = pointwise_product(pointwise_product(G, a), b);
    SpectralField right = pointwise_product(G, pointwise_product(a, b));
    double denom = besov_norm_value(Gamma, -alpha) * besov_norm_value(l1, beta) *
                   besov_norm_value(l2, beta);
    if (denom <= 0) return 0.0;
    return besov_norm_value(left - right, -alpha) / denom;
}

}  // namespace sfpe
