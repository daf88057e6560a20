#include "binci/coverage.hpp"

#include <algorithm>
#include <cmath>

#include "binci/estimators.hpp"
#include "binci/quadrature.hpp"
#include "binci/special_functions.hpp"

namespace binci {

namespace {

// integral_a^b pmf(n, x, p) dp = [I_b - I_a](x+1, n-x+1) / (n+1)
double pmf_integral(int n, int x, double a, double b) {
  return (reg_inc_beta(x + 1.0, n - x + 1.0, b) - reg_inc_beta(x + 1.0, n - x + 1.0, a)) /
         (n + 1.0);
}

double upper_coverage_generic(const endpoint_table& t, double p) {
  double c = 0.0;
  for (int x = 0; x <= t.n; ++x) {
    if (t.endpoints[x] >= p) c += binom_pmf(t.n, x, p);
  }
  return c;
}

double lower_coverage_generic(const endpoint_table& t, double p) {
  double c = 0.0;
  for (int x = 0; x <= t.n; ++x) {
    if (t.endpoints[x] < p) c += binom_pmf(t.n, x, p);
  }
  return c;
}

// Outcomes covering every p in a gap (lo, hi) that contains no endpoint:
// {x : u_x >= hi}.
std::vector<int> active_set(const endpoint_table& t, double hi) {
  std::vector<int> act;
  for (int x = 0; x <= t.n; ++x) {
    if (t.endpoints[x] >= hi) act.push_back(x);
  }
  return act;
}

bool is_suffix(const std::vector<int>& act, int n) {
  if (act.empty()) return true;
  return act.back() == n && act.back() - act.front() + 1 == static_cast<int>(act.size());
}

// Breakpoints of the coverage function inside (a, b): endpoint values plus
// the range ends.
std::vector<double> breakpoints(const endpoint_table& t, double a, double b) {
  std::vector<double> pts{a, b};
  for (double v : t.endpoints) {
    if (v > a && v < b) pts.push_back(v);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

// Exact integral of the upper-tail coverage over (a, b).
double coverage_integral_upper(const endpoint_table& t, double a, double b) {
  if (!(a <= b)) throw std::domain_error("coverage integral: empty range");
  if (!t.constraint_violation) {
    // monotone table: the covering set on (u_{i-1}, u_i) is the suffix {i..n}
    double total = 0.0;
    const auto& e = t.endpoints;
    const auto pts = breakpoints(t, a, b);
    for (size_t k = 0; k + 1 < pts.size(); ++k) {
      const double lo = pts[k], hi = pts[k + 1];
      const int i = static_cast<int>(std::lower_bound(e.begin(), e.end(), hi) - e.begin());
      if (i > t.n) continue;  // above u_n: coverage 0
      if (i == 0) {
        total += hi - lo;  // below u_0: coverage 1
      } else {
        total += tail_integral_upper(t.n, i, hi) - tail_integral_upper(t.n, i, lo);
      }
    }
    return total;
  }
  double total = 0.0;
  const auto pts = breakpoints(t, a, b);
  for (size_t k = 0; k + 1 < pts.size(); ++k) {
    const double lo = pts[k], hi = pts[k + 1];
    const auto act = active_set(t, hi);
    if (act.empty()) continue;
    if (is_suffix(act, t.n)) {
      if (act.front() == 0) {
        total += hi - lo;
      } else {
        total += tail_integral_upper(t.n, act.front(), hi) -
                 tail_integral_upper(t.n, act.front(), lo);
      }
    } else {
      for (int x : act) total += pmf_integral(t.n, x, lo, hi);
    }
  }
  return total;
}

void require_upper(const endpoint_table& t, const char* fn) {
  if (t.tail != tail_side::upper)
    throw std::domain_error(std::string(fn) + ": upper-tail table required");
}

}  // namespace

double coverage_at(const endpoint_table& t, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("coverage_at: p outside (0, 1)");
  const auto& e = t.endpoints;
  if (t.tail == tail_side::upper) {
    if (t.constraint_violation) return upper_coverage_generic(t, p);
    // i with u_{i-1} < p <= u_i (u_{-1} = 0); i = n+1 when p > u_n
    const int i = static_cast<int>(std::lower_bound(e.begin(), e.end(), p) - e.begin());
    return binom_sf(t.n, i, p);
  }
  if (t.constraint_violation) return lower_coverage_generic(t, p);
  // i with l_i < p <= l_{i+1}; for p > l_n the coverage is P(X <= n) = 1
  const int first_ge = static_cast<int>(std::lower_bound(e.begin(), e.end(), p) - e.begin());
  return binom_cdf(t.n, first_ge - 1, p);
}

double interspike_average(const endpoint_table& t, int i) {
  const auto& e = t.endpoints;
  double lo, hi;
  if (t.tail == tail_side::upper) {
    if (i < 1 || i > t.n) throw std::domain_error("interspike_average: gap index");
    lo = e[i - 1];
    hi = e[i];
  } else {
    if (i < 0 || i >= t.n) throw std::domain_error("interspike_average: gap index");
    lo = e[i];
    hi = e[i + 1];
  }
  if (!(hi > lo)) throw std::domain_error("interspike_average: degenerate gap");
  if (t.tail == tail_side::upper) {
    return (tail_integral_upper(t.n, i, hi) - tail_integral_upper(t.n, i, lo)) / (hi - lo);
  }
  return (tail_integral_lower(t.n, i, hi) - tail_integral_lower(t.n, i, lo)) / (hi - lo);
}

coverage_profile make_coverage_profile(const endpoint_table& t) {
  coverage_profile prof;
  prof.spikes = t.endpoints;
  prof.drops.resize(t.n + 1);
  for (int x = 0; x <= t.n; ++x) {
    const double s = std::clamp(t.endpoints[x], 0.0, 1.0);
    prof.drops[x] = binom_pmf(t.n, x, s);
  }
  const int lo_gap = t.tail == tail_side::upper ? 1 : 0;
  const int hi_gap = t.tail == tail_side::upper ? t.n : t.n - 1;
  for (int i = lo_gap; i <= hi_gap; ++i) {
    const double a = t.endpoints[t.tail == tail_side::upper ? i - 1 : i];
    const double b = t.endpoints[t.tail == tail_side::upper ? i : i + 1];
    // raw wald endpoints can leave [0, 1]; only in-domain gaps are reported
    if (b > a && a >= 0.0 && b <= 1.0) {
      prof.gaps.push_back({i, a, b, interspike_average(t, i)});
    }
  }
  return prof;
}

lcc_report is_lcc(const endpoint_table& t) {
  lcc_report rep;
  if (!satisfies_ordering(t.endpoints, t.tail)) {
    rep.lcc = false;
    rep.reason = "endpoint ordering chain violated";
    return rep;
  }
  if (t.tail == tail_side::upper && std::fabs(t.endpoints.back() - 1.0) > 1e-12) {
    rep.lcc = false;
    rep.reason = "u_n != 1";
    return rep;
  }
  const double target = 1.0 - t.alpha;
  const int lo_gap = t.tail == tail_side::upper ? 1 : 0;
  const int hi_gap = t.tail == tail_side::upper ? t.n : t.n - 1;
  rep.worst_margin = 1.0;
  for (int i = lo_gap; i <= hi_gap; ++i) {
    const double avg = interspike_average(t, i);
    rep.gap_averages.push_back(avg);
    const double margin = avg - target;
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_gap = i;
    }
  }
  rep.lcc = rep.worst_margin >= -1e-10;
  return rep;
}

truncated_coverage truncated_average_coverage(const endpoint_table& t) {
  require_upper(t, "truncated_average_coverage");
  const double u0 = t.endpoints.front();
  if (!(u0 < 1.0)) throw std::domain_error("truncated_average_coverage: u_0 >= 1");
  const double a = std::max(u0, 0.0);
  truncated_coverage out;
  out.u0 = u0;
  out.t_u = coverage_integral_upper(t, a, 1.0) / (1.0 - a);
  out.full_range_average = (1.0 - a) * out.t_u + a;
  out.two_tail_average = 2.0 * out.full_range_average - 1.0;
  return out;
}

double coverage_rmse(const endpoint_table& t) {
  require_upper(t, "coverage_rmse");
  const double u0 = std::max(t.endpoints.front(), 0.0);
  if (!(u0 < 1.0)) throw std::domain_error("coverage_rmse: u_0 >= 1");
  const double target = 1.0 - t.alpha;
  // (C_u - target)^2 has degree <= 2n per gap; n + 2 nodes are exact.
  const gauss_legendre_rule rule = gauss_legendre(t.n + 2);
  const auto pts = breakpoints(t, u0, 1.0);
  double total = 0.0;
  for (size_t k = 0; k + 1 < pts.size(); ++k) {
    const double lo = pts[k], hi = pts[k + 1];
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    const auto act = active_set(t, hi);
    const bool suffix = is_suffix(act, t.n);
    const int i = act.empty() ? t.n + 1 : act.front();
    for (size_t q = 0; q < rule.nodes.size(); ++q) {
      const double p = mid + half * rule.nodes[q];
      double c;
      if (suffix) {
        c = binom_sf(t.n, i, p);
      } else {
        c = 0.0;
        for (int x : act) c += binom_pmf(t.n, x, p);
      }
      const double err = c - target;
      total += rule.weights[q] * half * err * err;
    }
  }
  return std::sqrt(total / (1.0 - u0));
}

std::vector<double> two_tail_lengths(method_id m, int n, double alpha_two_tail) {
  const double a = alpha_two_tail / 2.0;
  const auto up = make_endpoint_table(m, n, a, tail_side::upper);
  const auto lo = make_endpoint_table(m, n, a, tail_side::lower);
  std::vector<double> len(n + 1);
  for (int x = 0; x <= n; ++x) {
    len[x] = std::min(up.endpoints[x], 1.0) - std::max(lo.endpoints[x], 0.0);
  }
  return len;
}

double expected_length(method_id m, int n, double alpha_two_tail, double p) {
  const auto len = two_tail_lengths(m, n, alpha_two_tail);
  double L = 0.0;
  for (int x = 0; x <= n; ++x) L += len[x] * binom_pmf(n, x, p);
  return L;
}

double ael(method_id m, int n, double alpha_two_tail) {
  const auto len = two_tail_lengths(m, n, alpha_two_tail);
  double s = 0.0;
  for (double v : len) s += v;
  return s / (n + 1.0);
}

method_metrics compute_method_metrics(method_id m, int n, double alpha,
                                      int length_samples) {
  method_metrics mm;
  mm.method = m;
  mm.n = n;
  mm.alpha = alpha;
  const auto up = make_endpoint_table(m, n, alpha, tail_side::upper);
  const auto trunc = truncated_average_coverage(up);
  mm.t_u = trunc.t_u;
  mm.u0 = trunc.u0;
  mm.rmse = coverage_rmse(up);
  const auto len = two_tail_lengths(m, n, 2.0 * alpha);
  double s = 0.0;
  for (double v : len) s += v;
  mm.ael = s / (n + 1.0);
  if (length_samples > 0) {
    mm.length_curve.reserve(length_samples);
    for (int k = 1; k <= length_samples; ++k) {
      const double p = static_cast<double>(k) / (length_samples + 1);
      double L = 0.0;
      for (int x = 0; x <= n; ++x) L += len[x] * binom_pmf(n, x, p);
      mm.length_curve.emplace_back(p, L);
    }
  }
  return mm;
}

}  // namespace binci
