#pragma once

#include <stdexcept>
#include <string>

namespace binci {

/// Thrown when an iterative numeric routine does not reach its tolerance.
struct convergence_error : std::runtime_error {
  explicit convergence_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// log C(n, k)
double log_choose(int n, int k);

/// C(n,x) p^x (1-p)^(n-x), evaluated in log space. Valid for n >= 1,
/// 0 <= x <= n, 0 <= p <= 1.
double binom_pmf(int n, int x, double p);

/// P(X >= i | p) for X ~ bin(n, p). Accepts 0 <= i <= n+1 so that the
/// degenerate tails P(X >= 0) = 1 and P(X >= n+1) = 0 are usable directly.
double binom_sf(int n, int i, double p);

/// P(X <= i | p); the complement of binom_sf(n, i+1, p). Accepts -1 <= i <= n.
double binom_cdf(int n, int i, double p);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double reg_inc_beta(double a, double b, double x);

/// Inverse of reg_inc_beta in x: returns x with I_x(a, b) = target.
/// Guarded Newton iteration; throws convergence_error on failure instead of
/// returning an unconverged value.
double reg_inc_beta_inv(double a, double b, double target);

/// G_i(q) = integral_0^q P(X >= i | p) dp, via the closed form
///   G_i(q) = q I_q(i, n-i+1) - (i/(n+1)) I_q(i+1, n-i+1).
/// Accepts 1 <= i <= n+1 (G_{n+1} is identically 0).
double tail_integral_upper(int n, int i, double q);

/// integral_0^q P(X <= i | p) dp = q - G_{i+1}(q), for 0 <= i <= n.
double tail_integral_lower(int n, int i, double q);

/// Quantile of the standard normal distribution, 0 < prob < 1.
double normal_quantile(double prob);

}  // namespace binci
