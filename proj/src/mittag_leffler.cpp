#include "sfpe/mittag_leffler.hpp"

#include <cmath>
#include <stdexcept>

namespace sfpe {

double mittag_leffler(double x, double a) {
    if (!(a > 0.0)) throw std::invalid_argument("mittag_leffler: parameter must be positive");
    if (!(x >= 0.0)) throw std::invalid_argument("mittag_leffler: argument must be nonnegative");
    if (x == 0.0) return 1.0;

    // Terms t_k = x^k / Gamma(a k + 1) via log-space recursion. The ratio
    // t_{k+1}/t_k = x Gamma(ak+1)/Gamma(ak+a+1) decreases in k, so once it
    // drops below one the tail is dominated by a geometric series:
    //   sum_{j>k} t_j <= t_k * r_k / (1 - r_k).
    // E_a(x) ~ exp(x^{1/a})/a for large x; past the double range report it as
    // infinite rather than looping on overflowed terms.
    if (x > 1.0 && std::log(x) / a > std::log(705.0)) return HUGE_VAL;

    double sum = 1.0;  // k = 0 term
    double log_x = std::log(x);
    for (int k = 1; k < 100000; ++k) {
        double log_t = k * log_x - std::lgamma(a * k + 1.0);
        if (log_t > 709.0) return HUGE_VAL;
        double t = std::exp(log_t);
        sum += t;
        double r = x * std::exp(std::lgamma(a * k + 1.0) - std::lgamma(a * (k + 1) + 1.0));
        if (r < 1.0) {
            double tail = t * r / (1.0 - r);
            if (tail <= 1e-14 * sum) return sum;
        }
    }
    throw std::runtime_error("mittag_leffler: series did not certify its tail");
}

}  // namespace sfpe
