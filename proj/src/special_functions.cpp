#include "binci/special_functions.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace binci {

namespace {

[[noreturn]] void domain_fail(const char* fn, const std::string& detail) {
  std::ostringstream os;
  os << fn << ": " << detail;
  throw std::domain_error(os.str());
}

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr int max_iter = 300;
  constexpr double eps = 1e-15;
  constexpr double fpmin = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= eps) return h;
  }
  throw convergence_error("reg_inc_beta: continued fraction did not converge");
}

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace

double log_choose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double binom_pmf(int n, int x, double p) {
  if (n < 1) domain_fail("binom_pmf", "n must be >= 1");
  if (x < 0 || x > n) domain_fail("binom_pmf", "x outside [0, n]");
  if (!(p >= 0.0 && p <= 1.0)) domain_fail("binom_pmf", "p outside [0, 1]");
  if (p == 0.0) return x == 0 ? 1.0 : 0.0;
  if (p == 1.0) return x == n ? 1.0 : 0.0;
  const double lp = log_choose(n, x) + x * std::log(p) + (n - x) * std::log1p(-p);
  return std::exp(lp);
}

double binom_sf(int n, int i, double p) {
  if (n < 1) domain_fail("binom_sf", "n must be >= 1");
  if (i < 0 || i > n + 1) domain_fail("binom_sf", "i outside [0, n+1]");
  if (!(p >= 0.0 && p <= 1.0)) domain_fail("binom_sf", "p outside [0, 1]");
  if (i == 0) return 1.0;
  if (i == n + 1) return 0.0;
  return reg_inc_beta(i, n - i + 1.0, p);
}

double binom_cdf(int n, int i, double p) {
  if (i < -1 || i > n) domain_fail("binom_cdf", "i outside [-1, n]");
  return 1.0 - binom_sf(n, i + 1, p);
}

double reg_inc_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) domain_fail("reg_inc_beta", "a, b must be > 0");
  if (!(x >= 0.0 && x <= 1.0)) domain_fail("reg_inc_beta", "x outside [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double bt = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return bt * beta_cf(a, b, x) / a;
  }
  return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

double reg_inc_beta_inv(double a, double b, double target) {
  if (!(a > 0.0) || !(b > 0.0)) domain_fail("reg_inc_beta_inv", "a, b must be > 0");
  if (!(target >= 0.0 && target <= 1.0))
    domain_fail("reg_inc_beta_inv", "target outside [0, 1]");
  if (target == 0.0) return 0.0;
  if (target == 1.0) return 1.0;

  // Initial guess: normal approximation for a, b >= 1, otherwise the
  // matched power-tail form.
  double x;
  if (a >= 1.0 && b >= 1.0) {
    const double pp = target < 0.5 ? target : 1.0 - target;
    const double t = std::sqrt(-2.0 * std::log(pp));
    double z = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
    if (target < 0.5) z = -z;
    const double al = (z * z - 3.0) / 6.0;
    const double h = 2.0 / (1.0 / (2.0 * a - 1.0) + 1.0 / (2.0 * b - 1.0));
    const double w = z * std::sqrt(al + h) / h -
                     (1.0 / (2.0 * b - 1.0) - 1.0 / (2.0 * a - 1.0)) *
                         (al + 5.0 / 6.0 - 2.0 / (3.0 * h));
    x = a / (a + b * std::exp(2.0 * w));
  } else {
    const double lna = std::log(a / (a + b));
    const double lnb = std::log(b / (a + b));
    const double t = std::exp(a * lna) / a;
    const double u = std::exp(b * lnb) / b;
    const double w = t + u;
    if (target < t / w) {
      x = std::pow(a * w * target, 1.0 / a);
    } else {
      x = 1.0 - std::pow(b * w * (1.0 - target), 1.0 / b);
    }
  }
  x = std::min(1.0 - 1e-16, std::max(1e-300, x));

  // Newton on I_x(a,b) - target with a bisection bracket as safety net.
  const double lbeta = log_beta(a, b);
  double lo = 0.0, hi = 1.0;
  constexpr int max_iter = 200;
  for (int it = 0; it < max_iter; ++it) {
    const double err = reg_inc_beta(a, b, x) - target;
    if (err > 0.0) {
      hi = x;
    } else if (err < 0.0) {
      lo = x;
    } else {
      return x;
    }
    if (std::fabs(err) < 1e-15 && it > 0) return x;
    const double logd = (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - lbeta;
    double step;
    if (logd > -690.0) {
      step = err / std::exp(logd);
    } else {
      step = 0.0;  // density vanishes; fall back to bisection
    }
    double next = x - step;
    if (!(next > lo && next < hi) || step == 0.0) {
      next = 0.5 * (lo + hi);
    }
    if (next == x || hi - lo < 1e-17) {
      return x;
    }
    x = next;
  }
  throw convergence_error("reg_inc_beta_inv: no convergence");
}

double tail_integral_upper(int n, int i, double q) {
  if (n < 1) domain_fail("tail_integral_upper", "n must be >= 1");
  if (i < 1 || i > n + 1) domain_fail("tail_integral_upper", "i outside [1, n+1]");
  if (!(q >= 0.0 && q <= 1.0)) domain_fail("tail_integral_upper", "q outside [0, 1]");
  if (i == n + 1) return 0.0;
  if (q == 0.0) return 0.0;
  return q * reg_inc_beta(i, n - i + 1.0, q) -
         (static_cast<double>(i) / (n + 1.0)) * reg_inc_beta(i + 1.0, n - i + 1.0, q);
}

double tail_integral_lower(int n, int i, double q) {
  if (i < 0 || i > n) domain_fail("tail_integral_lower", "i outside [0, n]");
  if (!(q >= 0.0 && q <= 1.0)) domain_fail("tail_integral_lower", "q outside [0, 1]");
  return q - tail_integral_upper(n, i + 1, q);
}

double normal_quantile(double prob) {
  if (!(prob > 0.0 && prob < 1.0)) domain_fail("normal_quantile", "prob outside (0, 1)");

  // Acklam's rational approximation, then Halley refinement on the erfc-based cdf.
  static constexpr double pa[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double pb[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
  static constexpr double pc[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double pd[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double plow = 0.02425;

  double x;
  if (prob < plow) {
    const double q = std::sqrt(-2.0 * std::log(prob));
    x = (((((pc[0] * q + pc[1]) * q + pc[2]) * q + pc[3]) * q + pc[4]) * q + pc[5]) /
        ((((pd[0] * q + pd[1]) * q + pd[2]) * q + pd[3]) * q + 1.0);
  } else if (prob <= 1.0 - plow) {
    const double q = prob - 0.5;
    const double r = q * q;
    x = (((((pa[0] * r + pa[1]) * r + pa[2]) * r + pa[3]) * r + pa[4]) * r + pa[5]) * q /
        (((((pb[0] * r + pb[1]) * r + pb[2]) * r + pb[3]) * r + pb[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-prob));
    x = -(((((pc[0] * q + pc[1]) * q + pc[2]) * q + pc[3]) * q + pc[4]) * q + pc[5]) /
        ((((pd[0] * q + pd[1]) * q + pd[2]) * q + pd[3]) * q + 1.0);
  }

  constexpr double sqrt2pi = 2.5066282746310005;
  for (int it = 0; it < 2; ++it) {
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - prob;
    const double u = e * sqrt2pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

}  // namespace binci
