#include "gfra/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace gfra {

namespace {
// Below this mean exp(-mu) is comfortably representable.
constexpr double kDirectLimit = 700.0;
}  // namespace

double qfunc(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double poisson_log_pmf(long k, double mu) {
    return -mu + static_cast<double>(k) * std::log(mu) - std::lgamma(static_cast<double>(k) + 1.0);
}

double poisson_cdf(long k, double mu) {
    if (mu < 0.0 || std::isnan(mu)) throw std::invalid_argument("poisson_cdf: mean must be nonnegative");
    if (k < 0) return 0.0;
    if (mu == 0.0) return 1.0;

    double sum = 0.0;
    if (mu < kDirectLimit) {
        double term = std::exp(-mu);
        sum = term;
        for (long i = 1; i <= k; ++i) {
            term *= mu / static_cast<double>(i);
            sum += term;
            if (i > mu && term < sum * 1e-17) break;
        }
    } else {
        // exp(-mu) underflows; only terms near the mode matter.
        const long lo = std::max(0L, static_cast<long>(mu - 40.0 * std::sqrt(mu)));
        for (long i = lo; i <= k; ++i) {
            const double term = std::exp(poisson_log_pmf(i, mu));
            sum += term;
            if (i > mu && term < sum * 1e-17) break;
        }
    }
    return std::min(sum, 1.0);
}

double regularized_gamma_q(double s, double x) {
    if (x <= 0.0) return 1.0;
    return boost::math::gamma_q(s, x);
}

double marcum_q1(double a, double b) {
    if (a < 0.0 || b < 0.0) throw std::invalid_argument("marcum_q1: arguments must be nonnegative");
    if (b == 0.0) return 1.0;
    const double x = 0.5 * a * a;
    const double y = 0.5 * b * b;
    if (x == 0.0) return std::exp(-y);

    const bool direct = x < kDirectLimit && y < kDirectLimit;
    // Weights of the mixture and the running Poisson(y) cdf.
    double weight = direct ? std::exp(-x) : 0.0;
    double cdf_term = direct ? std::exp(-y) : 0.0;
    double cdf = 0.0;
    double sum = 0.0;
    const long max_terms = static_cast<long>(x + y + 60.0 * std::sqrt(x + y + 1.0) + 200.0);
    for (long k = 0; k <= max_terms; ++k) {
        if (direct) {
            if (k > 0) {
                weight *= x / static_cast<double>(k);
                cdf_term *= y / static_cast<double>(k);
            }
        } else {
            weight = std::exp(poisson_log_pmf(k, x));
            cdf_term = std::exp(poisson_log_pmf(k, y));
        }
        cdf = std::min(1.0, cdf + cdf_term);
        sum += weight * cdf;
        // For k+1 > x the remaining weights decay geometrically with ratio x/(k+1).
        const double ratio = x / static_cast<double>(k + 1);
        if (ratio < 1.0) {
            const double tail = weight * ratio / (1.0 - ratio);
            if (tail <= 1e-16 * sum) break;
        }
    }
    return std::clamp(sum, 0.0, 1.0);
}

double marcum_p1(double a, double b) {
    if (a < 0.0 || b < 0.0) throw std::invalid_argument("marcum_p1: arguments must be nonnegative");
    if (b == 0.0) return 0.0;
    const double x = 0.5 * a * a;
    const double y = 0.5 * b * b;
    if (x == 0.0) return -std::expm1(-y);

    // P(Pois(y) > k) = P_gamma(k + 1, y) decreases in k, which bounds the tail.
    double sum = 0.0;
    const long max_terms = static_cast<long>(x + 60.0 * std::sqrt(x + 1.0) + 200.0);
    for (long k = 0; k <= max_terms; ++k) {
        const double weight = std::exp(poisson_log_pmf(k, x));
        const double upper = boost::math::gamma_p(static_cast<double>(k + 1), y);
        sum += weight * upper;
        const double ratio = x / static_cast<double>(k + 1);
        if (ratio < 1.0 && weight * ratio / (1.0 - ratio) * upper <= 1e-16 * sum) break;
        if (upper == 0.0 && k > x) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

}  // namespace gfra
