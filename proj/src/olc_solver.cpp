#include "binci/olc_solver.hpp"

#include <cmath>
#include <sstream>

#include "binci/special_functions.hpp"

namespace binci {

namespace {

constexpr double kBracketEps = 1e-15;
constexpr double kEndpointTol = 1e-12;
constexpr int kMaxIterations = 300;

void check_args(const char* fn, int n, double alpha) {
  if (n < 1) throw std::domain_error(std::string(fn) + ": n must be >= 1");
  if (!(alpha > 0.0 && alpha < 0.5))
    throw std::domain_error(std::string(fn) + ": alpha outside (0, 0.5)");
}

[[noreturn]] void bracket_fail(int n, double alpha, tail_side tail, int i) {
  std::ostringstream os;
  os << "olc solve (" << tail_name(tail) << ", n=" << n << ", alpha=" << alpha
     << "): averaged-coverage equation has no root at index " << i
     << "; alpha is outside the solvable range";
  throw bracket_error(os.str());
}

struct root_result {
  double value;
  double residual;
  int iterations;
};

// Given u_i, find u_{i-1} in (0, u_i) so that the average of P(X >= i | p)
// over (u_{i-1}, u_i) equals target. The average is strictly increasing in
// the left edge, so a root exists iff
//   G_i(u_i)/u_i < target <= P(X >= i | u_i),
// which is checked through well-conditioned quantities rather than the sign
// of the integral difference at the bracket edges.
root_result upper_step(int n, int i, double u_i, double target, double alpha) {
  const double g_hi = tail_integral_upper(n, i, u_i);
  auto f = [&](double t) {
    return (g_hi - tail_integral_upper(n, i, t)) - target * (u_i - t);
  };
  double lo = kBracketEps;
  double hi = u_i - kBracketEps;
  if (!(binom_sf(n, i, u_i) > target) || !(f(lo) < 0.0) || !(lo < hi)) {
    bracket_fail(n, alpha, tail_side::upper, i);
  }
  int it = 0;
  while (hi - lo > kEndpointTol) {
    if (++it > kMaxIterations)
      throw convergence_error("olc upper solve: bisection exceeded iteration cap");
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double t = 0.5 * (lo + hi);
  const double avg = (g_hi - tail_integral_upper(n, i, t)) / (u_i - t);
  return {t, std::fabs(avg - target), it};
}

// Given l_i, find l_{i+1} in (l_i, 1) so that the average of P(X <= i | p)
// over (l_i, l_{i+1}) equals target. The average is strictly decreasing in
// the right edge.
root_result lower_step(int n, int i, double l_i, double target, double alpha) {
  const double h_lo = tail_integral_lower(n, i, l_i);
  auto f = [&](double t) {
    return (tail_integral_lower(n, i, t) - h_lo) - target * (t - l_i);
  };
  double lo = l_i + kBracketEps;
  double hi = 1.0 - kBracketEps;
  if (!(binom_cdf(n, i, l_i) > target) || !(f(hi) < 0.0) || !(lo < hi)) {
    bracket_fail(n, alpha, tail_side::lower, i);
  }
  int it = 0;
  while (hi - lo > kEndpointTol) {
    if (++it > kMaxIterations)
      throw convergence_error("olc lower solve: bisection exceeded iteration cap");
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double t = 0.5 * (lo + hi);
  const double avg = (tail_integral_lower(n, i, t) - h_lo) / (t - l_i);
  return {t, std::fabs(avg - target), it};
}

bool outside_guarantee(double alpha) { return !(alpha > 0.0001 && alpha < 0.27); }

}  // namespace

olc_solve_trace olc_solve_upper(int n, double alpha) {
  check_args("olc_solve_upper", n, alpha);
  olc_solve_trace tr;
  tr.n = n;
  tr.alpha = alpha;
  tr.tail = tail_side::upper;
  tr.alpha_outside_guarantee = outside_guarantee(alpha);
  tr.endpoints.assign(n + 1, 0.0);
  tr.residuals.assign(n + 1, 0.0);
  tr.iterations.assign(n + 1, 0);
  tr.endpoints[n] = 1.0;
  const double target = 1.0 - alpha;
  for (int i = n; i >= 1; --i) {
    const root_result r = upper_step(n, i, tr.endpoints[i], target, alpha);
    tr.endpoints[i - 1] = r.value;
    tr.residuals[i - 1] = r.residual;
    tr.iterations[i - 1] = r.iterations;
  }
  return tr;
}

olc_solve_trace olc_solve_lower(int n, double alpha) {
  check_args("olc_solve_lower", n, alpha);
  olc_solve_trace tr;
  tr.n = n;
  tr.alpha = alpha;
  tr.tail = tail_side::lower;
  tr.alpha_outside_guarantee = outside_guarantee(alpha);
  tr.endpoints.assign(n + 1, 0.0);
  tr.residuals.assign(n + 1, 0.0);
  tr.iterations.assign(n + 1, 0);
  const double target = 1.0 - alpha;
  for (int i = 0; i < n; ++i) {
    const root_result r = lower_step(n, i, tr.endpoints[i], target, alpha);
    tr.endpoints[i + 1] = r.value;
    tr.residuals[i + 1] = r.residual;
    tr.iterations[i + 1] = r.iterations;
  }
  return tr;
}

std::vector<double> olc_solve_upper_from(int n, double alpha, int j, double u_j) {
  check_args("olc_solve_upper_from", n, alpha);
  if (j < 0 || j > n) throw std::domain_error("olc_solve_upper_from: j outside [0, n]");
  if (!(u_j > 0.0 && u_j <= 1.0))
    throw std::domain_error("olc_solve_upper_from: u_j outside (0, 1]");
  std::vector<double> u(j + 1, 0.0);
  u[j] = u_j;
  const double target = 1.0 - alpha;
  for (int i = j; i >= 1; --i) {
    u[i - 1] = upper_step(n, i, u[i], target, alpha).value;
  }
  return u;
}

endpoint_table olc_table(int n, double alpha, tail_side tail) {
  const olc_solve_trace tr =
      tail == tail_side::upper ? olc_solve_upper(n, alpha) : olc_solve_lower(n, alpha);
  endpoint_table t;
  t.method = method_id::olc;
  t.n = n;
  t.alpha = alpha;
  t.tail = tail;
  t.endpoints = tr.endpoints;
  t.constraint_violation = !satisfies_ordering(t.endpoints, tail);
  return t;
}

}  // namespace binci
