#pragma once

#include <string>
#include <utility>
#include <vector>

#include "binci/methods.hpp"

namespace binci {

/// Coverage probability of the one-tail estimator described by `table` at p,
/// 0 < p < 1. Upper tables: probability that the random interval (0, u_X)
/// covers p; lower tables: that (l_X, 1) covers p. Tables that violate the
/// ordering chain (Wald) are handled through the defining sum over outcomes.
double coverage_at(const endpoint_table& table, double p);

/// Exact average coverage between consecutive spikes. Upper tables: gap i is
/// (u_{i-1}, u_i), i in [1, n]. Lower tables: gap i is (l_i, l_{i+1}),
/// i in [0, n-1].
double interspike_average(const endpoint_table& table, int i);

struct coverage_gap_info {
  int index = 0;      // gap index in the tail's convention
  double lo = 0.0;
  double hi = 0.0;
  double average = 0.0;
};

struct coverage_profile {
  std::vector<double> spikes;            // the endpoints
  std::vector<double> drops;             // coverage drop at each spike
  std::vector<coverage_gap_info> gaps;   // positive-width inter-spike gaps
};

coverage_profile make_coverage_profile(const endpoint_table& table);

struct lcc_report {
  bool lcc = false;
  std::string reason;                 // empty when the ordering pre-check passed
  std::vector<double> gap_averages;
  double worst_margin = 0.0;          // min(average - (1 - alpha)) over gaps
  int worst_gap = -1;
};

/// True iff every inter-spike average coverage is >= 1 - alpha - 1e-10.
/// Tables failing the ordering chain (or upper tables with u_n != 1) are
/// reported false with the reason set.
lcc_report is_lcc(const endpoint_table& table);

struct truncated_coverage {
  double t_u = 0.0;                // average coverage over (u_0, 1)
  double u0 = 0.0;
  double full_range_average = 0.0; // (1 - u_0) T_u + u_0
  double two_tail_average = 0.0;   // 2 {(1 - u_0) T_u + u_0} - 1
};

/// Upper-tail tables only.
truncated_coverage truncated_average_coverage(const endpoint_table& table);

/// Root mean square of C_u(p) - (1 - alpha) over (u_0, 1). The integrand is
/// piecewise polynomial of degree <= 2n, integrated exactly with a
/// Gauss-Legendre rule per gap. Upper-tail tables only.
double coverage_rmse(const endpoint_table& table);

/// Two-tail interval lengths per outcome, clamped to the parameter space
/// [0, 1] (relevant only for Wald, whose raw endpoints may leave [0, 1]).
std::vector<double> two_tail_lengths(method_id m, int n, double alpha_two_tail);

/// L_n(p) = sum_x (u_x - l_x) pmf(n, x, p).
double expected_length(method_id m, int n, double alpha_two_tail, double p);

/// Average expected length over p uniform on (0, 1); closed form
/// sum_x (u_x - l_x) / (n + 1).
double ael(method_id m, int n, double alpha_two_tail);

struct method_metrics {
  method_id method{};
  int n = 0;
  double alpha = 0.0;  // one-tail level; the two-tail AEL uses 2 * alpha
  double t_u = 0.0;
  double u0 = 0.0;
  double rmse = 0.0;
  double ael = 0.0;
  std::vector<std::pair<double, double>> length_curve;  // sampled (p, L_n(p))
};

method_metrics compute_method_metrics(method_id m, int n, double alpha,
                                      int length_samples = 0);

}  // namespace binci
