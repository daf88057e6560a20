#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

namespace binci {

enum class method_id {
  olc,
  clopper_pearson,
  mid_p,
  wald,
  agresti_coull,
  wilson,
  jeffreys,
};

inline constexpr std::array<method_id, 7> all_methods = {
    method_id::olc,          method_id::clopper_pearson, method_id::mid_p,
    method_id::wald,         method_id::agresti_coull,   method_id::wilson,
    method_id::jeffreys,
};

std::string_view method_name(method_id m);
std::optional<method_id> parse_method(std::string_view name);

enum class tail_side { upper, lower };

std::string_view tail_name(tail_side t);
std::optional<tail_side> parse_tail(std::string_view name);

/// One-tail endpoints u_0..u_n (upper) or l_0..l_n (lower) for fixed
/// (method, n, alpha). `constraint_violation` is set when the table fails
/// the ordering/bounds chain required of a sensible estimator
/// (upper: 0 < u_0 < ... < u_n <= 1; lower: 0 = l_0 < ... < l_n < 1).
/// Wald tables are reported raw and flagged, never repaired.
struct endpoint_table {
  method_id method{};
  int n = 0;
  double alpha = 0.0;
  tail_side tail = tail_side::upper;
  std::vector<double> endpoints;
  bool constraint_violation = false;
};

/// True when the endpoint list satisfies the ordering/bounds chain for its tail.
bool satisfies_ordering(const std::vector<double>& endpoints, tail_side tail);

struct interval_estimate {
  method_id method{};
  int n = 0;
  int x = 0;
  double confidence = 0.0;  // two-tail level 1 - 2*alpha
  double lower = 0.0;
  double upper = 0.0;
};

}  // namespace binci
