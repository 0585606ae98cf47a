#include "gfra/analytics.hpp"

#include <cmath>
#include <stdexcept>

#include "gfra/special_functions.hpp"

namespace gfra {

namespace {

void require_preambles(int L) {
    if (L < 1) throw std::invalid_argument("number of preambles must be at least 1");
}

void require_spreading(int L, int N) {
    require_preambles(L);
    if (N < 0 || N > L) throw std::invalid_argument("spreading factor must satisfy 0 <= N <= L");
}

double survive(int L, double exponent) { return std::pow(1.0 - 1.0 / L, exponent); }

double log_binomial_pmf(int n, int k, double p) {
    if (p <= 0.0) return k == 0 ? 0.0 : -INFINITY;
    if (p >= 1.0) return k == n ? 0.0 : -INFINITY;
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
           k * std::log(p) + (n - k) * std::log1p(-p);
}

}  // namespace

double alpha(int K, int L) {
    require_preambles(L);
    if (K <= 0) return 0.0;
    return (static_cast<double>(K) / L) * survive(L, K - 1);
}

double beta(int K, int L) {
    require_preambles(L);
    if (K <= 1) return 0.0;
    const double b = 1.0 - alpha(K, L) - survive(L, K);
    return b < 0.0 ? 0.0 : b;
}

double kappa_td(double lambda, int L) {
    require_preambles(L);
    if (lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
    return lambda * std::exp(-lambda / L);
}

double kappa_td_cond(int K, int L) {
    require_preambles(L);
    if (K <= 0) return 0.0;
    return K * survive(L, K - 1);
}

double slot_length(int L, double D) { return L + L * D; }

double cdma_block_length(int L, int N, double D) {
    if (N < 1) throw std::invalid_argument("spreading factor must be at least 1");
    return static_cast<double>(L) * D / N;
}

double eta_td(double lambda, int L, double D) {
    if (D < 1.0) throw std::invalid_argument("D must be at least 1");
    return D * kappa_td(lambda, L) / slot_length(L, D);
}

double eta_td_limit(double lambda, int L) { return kappa_td(lambda, L) / L; }

double nu_bar(int L, int N) {
    require_spreading(L, N);
    return L - (N + 1) * survive(L, N) - L * survive(L, N + 1);
}

double q_bar(int L, int N) { return nu_bar(L, N); }

double cdf_term(double lambda, int L, int N, CdfRounding rounding) {
    require_spreading(L, N);
    if (lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
    const double lambda_bar = lambda * (1.0 - 1.0 / L);
    const double index = N + q_bar(L, N);
    switch (rounding) {
        case CdfRounding::Round:
            return poisson_cdf(std::lround(index) - 1, lambda_bar);
        case CdfRounding::Floor:
            return poisson_cdf(static_cast<long>(std::floor(index)) - 1, lambda_bar);
        case CdfRounding::Continuous:
            return regularized_gamma_q(index, lambda_bar);
    }
    return 0.0;
}

double kappa_cd(double lambda, int L, int N, CdfRounding rounding) {
    return kappa_td(lambda, L) * cdf_term(lambda, L, N, rounding);
}

double eta_cd(double lambda, int L, int N, double D, CdfRounding rounding) {
    if (D < 1.0) throw std::invalid_argument("D must be at least 1");
    const double d_bar = cdma_block_length(L, N, D);
    return d_bar * kappa_cd(lambda, L, N, rounding) / (L + N * d_bar);
}

double eta_cd_limit(double lambda, int L, int N, CdfRounding rounding) {
    if (N < 1) throw std::invalid_argument("spreading factor must be at least 1");
    return kappa_cd(lambda, L, N, rounding) / N;
}

double gain_ratio(double lambda, int L, int N, CdfRounding rounding) {
    if (N < 1) throw std::invalid_argument("spreading factor must be at least 1");
    return static_cast<double>(L) / N * cdf_term(lambda, L, N, rounding);
}

double overload_probability(int K, int L, int N) {
    require_spreading(L, N);
    if (K <= N) return 0.0;
    const double b = beta(K, L);
    double sum = 0.0;
    for (int l = 0; l <= K - N - 1 && l <= L; ++l) sum += std::exp(log_binomial_pmf(L, l, b));
    return std::min(sum, 1.0);
}

double overload_probability_poisson(int K, int L, int N) {
    require_spreading(L, N);
    if (K <= N) return 0.0;
    const double nu = L * beta(K, L);
    return poisson_cdf(K - N - 1, nu);
}

}  // namespace gfra
