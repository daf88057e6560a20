#pragma once

#include "binci/methods.hpp"

namespace binci {

/// Exact tail inversion: upper u_i solves P(X <= i | u_i) = alpha, lower l_i
/// solves P(X >= i | l_i) = alpha, with u_n = 1 and l_0 = 0.
endpoint_table clopper_pearson_table(int n, double alpha, tail_side tail);

/// Halves the probability of the observed outcome in the tail equation;
/// endpoints located by bisection, then l_0 = 0 and u_n = 1 are forced.
endpoint_table midp_table(int n, double alpha, tail_side tail);

/// phat +/- z sqrt(phat(1-phat)/n), reported raw: no clipping and no endpoint
/// forcing. The degenerate x = 0 and x = n cells are the method's documented
/// pathology and are flagged through endpoint_table::constraint_violation.
endpoint_table wald_table(int n, double alpha, tail_side tail);

/// Center/width form ptilde = (x + z^2/2)/(n + z^2) with variance evaluated
/// at ptilde; endpoints clipped to [0, 1].
endpoint_table agresti_coull_table(int n, double alpha, tail_side tail);

/// Score-test inversion.
endpoint_table wilson_table(int n, double alpha, tail_side tail);

/// Beta(x + 1/2, n - x + 1/2) posterior quantiles, with l_0 = 0 and u_n = 1
/// forced.
endpoint_table jeffreys_table(int n, double alpha, tail_side tail);

/// Dispatch over all seven methods (including OLC).
endpoint_table make_endpoint_table(method_id m, int n, double alpha, tail_side tail);

/// Equal-tail two-sided interval: lower endpoint at one-tail level 1-alpha
/// and upper endpoint at one-tail level 1-alpha, alpha = alpha_two_tail / 2.
interval_estimate two_tail_interval(method_id m, int n, int x, double alpha_two_tail);

}  // namespace binci
