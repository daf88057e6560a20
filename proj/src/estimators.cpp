#include "binci/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "binci/olc_solver.hpp"
#include "binci/special_functions.hpp"

namespace binci {

namespace {

void check_args(const char* fn, int n, double alpha) {
  if (n < 1) throw std::domain_error(std::string(fn) + ": n must be >= 1");
  if (!(alpha > 0.0 && alpha < 0.5))
    throw std::domain_error(std::string(fn) + ": alpha outside (0, 0.5)");
}

endpoint_table finish(method_id m, int n, double alpha, tail_side tail,
                      std::vector<double> endpoints) {
  endpoint_table t;
  t.method = m;
  t.n = n;
  t.alpha = alpha;
  t.tail = tail;
  t.endpoints = std::move(endpoints);
  t.constraint_violation = !satisfies_ordering(t.endpoints, tail);
  return t;
}

// Solve h(v) = 0 for the mid-p tail equation by bisection on (0, 1).
// h is strictly monotone in v; tolerance 1e-12 on the endpoint.
template <class H>
double midp_bisect(H&& h, bool decreasing) {
  double lo = 0.0, hi = 1.0;
  const double f_lo = h(lo);
  const double f_hi = h(hi);
  if ((decreasing && !(f_lo > 0.0 && f_hi < 0.0)) ||
      (!decreasing && !(f_lo < 0.0 && f_hi > 0.0))) {
    throw convergence_error("midp_table: root not bracketed (internal error)");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f = h(mid);
    if ((f > 0.0) == decreasing) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

endpoint_table clopper_pearson_table(int n, double alpha, tail_side tail) {
  check_args("clopper_pearson_table", n, alpha);
  std::vector<double> e(n + 1);
  if (tail == tail_side::upper) {
    for (int i = 0; i < n; ++i) e[i] = reg_inc_beta_inv(i + 1.0, n - i, 1.0 - alpha);
    e[n] = 1.0;
  } else {
    e[0] = 0.0;
    for (int i = 1; i <= n; ++i) e[i] = reg_inc_beta_inv(i, n - i + 1.0, alpha);
  }
  return finish(method_id::clopper_pearson, n, alpha, tail, std::move(e));
}

endpoint_table midp_table(int n, double alpha, tail_side tail) {
  check_args("midp_table", n, alpha);
  std::vector<double> e(n + 1);
  if (tail == tail_side::upper) {
    // P(X < i | u_i) + 0.5 P(X = i | u_i) = alpha; left side strictly
    // decreasing in u_i.
    for (int i = 0; i < n; ++i) {
      e[i] = midp_bisect(
          [&](double u) {
            return binom_cdf(n, i - 1, u) + 0.5 * binom_pmf(n, i, u) - alpha;
          },
          /*decreasing=*/true);
    }
    e[n] = 1.0;
  } else {
    e[0] = 0.0;
    for (int i = 1; i <= n; ++i) {
      e[i] = midp_bisect(
          [&](double l) {
            return binom_sf(n, i + 1, l) + 0.5 * binom_pmf(n, i, l) - alpha;
          },
          /*decreasing=*/false);
    }
  }
  return finish(method_id::mid_p, n, alpha, tail, std::move(e));
}

endpoint_table wald_table(int n, double alpha, tail_side tail) {
  check_args("wald_table", n, alpha);
  const double z = normal_quantile(1.0 - alpha);
  std::vector<double> e(n + 1);
  for (int x = 0; x <= n; ++x) {
    const double ph = static_cast<double>(x) / n;
    const double hw = z * std::sqrt(ph * (1.0 - ph) / n);
    e[x] = tail == tail_side::upper ? ph + hw : ph - hw;
  }
  return finish(method_id::wald, n, alpha, tail, std::move(e));
}

endpoint_table agresti_coull_table(int n, double alpha, tail_side tail) {
  check_args("agresti_coull_table", n, alpha);
  const double z = normal_quantile(1.0 - alpha);
  const double z2 = z * z;
  std::vector<double> e(n + 1);
  for (int x = 0; x <= n; ++x) {
    const double pt = (x + z2 / 2.0) / (n + z2);
    const double hw = z * std::sqrt(pt * (1.0 - pt) / (n + z2));
    const double v = tail == tail_side::upper ? pt + hw : pt - hw;
    e[x] = std::clamp(v, 0.0, 1.0);
  }
  return finish(method_id::agresti_coull, n, alpha, tail, std::move(e));
}

endpoint_table wilson_table(int n, double alpha, tail_side tail) {
  check_args("wilson_table", n, alpha);
  const double z = normal_quantile(1.0 - alpha);
  const double z2 = z * z;
  std::vector<double> e(n + 1);
  for (int x = 0; x <= n; ++x) {
    // The score bounds at the degenerate cells are exactly 0 and 1.
    if (tail == tail_side::lower && x == 0) {
      e[x] = 0.0;
      continue;
    }
    if (tail == tail_side::upper && x == n) {
      e[x] = 1.0;
      continue;
    }
    const double ph = static_cast<double>(x) / n;
    const double center = (n * ph + z2 / 2.0) / (n + z2);
    const double hw = (z / (n + z2)) * std::sqrt(n * ph * (1.0 - ph) + z2 / 4.0);
    e[x] = tail == tail_side::upper ? center + hw : center - hw;
  }
  return finish(method_id::wilson, n, alpha, tail, std::move(e));
}

endpoint_table jeffreys_table(int n, double alpha, tail_side tail) {
  check_args("jeffreys_table", n, alpha);
  std::vector<double> e(n + 1);
  if (tail == tail_side::upper) {
    for (int i = 0; i < n; ++i)
      e[i] = reg_inc_beta_inv(i + 0.5, n - i + 0.5, 1.0 - alpha);
    e[n] = 1.0;
  } else {
    e[0] = 0.0;
    for (int i = 1; i <= n; ++i)
      e[i] = reg_inc_beta_inv(i + 0.5, n - i + 0.5, alpha);
  }
  return finish(method_id::jeffreys, n, alpha, tail, std::move(e));
}

endpoint_table make_endpoint_table(method_id m, int n, double alpha, tail_side tail) {
  switch (m) {
    case method_id::olc: return olc_table(n, alpha, tail);
    case method_id::clopper_pearson: return clopper_pearson_table(n, alpha, tail);
    case method_id::mid_p: return midp_table(n, alpha, tail);
    case method_id::wald: return wald_table(n, alpha, tail);
    case method_id::agresti_coull: return agresti_coull_table(n, alpha, tail);
    case method_id::wilson: return wilson_table(n, alpha, tail);
    case method_id::jeffreys: return jeffreys_table(n, alpha, tail);
  }
  throw std::domain_error("make_endpoint_table: unknown method");
}

interval_estimate two_tail_interval(method_id m, int n, int x, double alpha_two_tail) {
  if (x < 0 || x > n) throw std::domain_error("two_tail_interval: x outside [0, n]");
  if (!(alpha_two_tail > 0.0 && alpha_two_tail < 1.0))
    throw std::domain_error("two_tail_interval: alpha_two_tail outside (0, 1)");
  const double a = alpha_two_tail / 2.0;
  interval_estimate iv;
  iv.method = m;
  iv.n = n;
  iv.x = x;
  iv.confidence = 1.0 - alpha_two_tail;
  iv.lower = make_endpoint_table(m, n, a, tail_side::lower).endpoints[x];
  iv.upper = make_endpoint_table(m, n, a, tail_side::upper).endpoints[x];
  return iv;
}

}  // namespace binci
