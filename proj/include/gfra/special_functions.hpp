#pragma once

namespace gfra {

/// Gaussian tail probability Q(x) = P(Z > x), Z ~ N(0, 1).
double qfunc(double x);

/// log of the Poisson pmf at k with mean mu > 0.
double poisson_log_pmf(long k, double mu);

/// P(X <= k) for X ~ Poisson(mu); equals Gamma(k+1, mu) / k!.
/// Returns 0 for k < 0 and 1 for mu == 0.
double poisson_cdf(long k, double mu);

/// Regularized upper incomplete gamma Gamma(s, x) / Gamma(s).
double regularized_gamma_q(double s, double x);

/// First-order Marcum Q function, evaluated as a Poisson mixture of
/// Poisson cdfs: Q1(a, b) = sum_k Pois(k; a^2/2) * P(Pois(b^2/2) <= k).
double marcum_q1(double a, double b);

/// 1 - Q1(a, b), summed directly so small values keep their relative accuracy.
double marcum_p1(double a, double b);

}  // namespace gfra
