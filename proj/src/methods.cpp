#include "binci/methods.hpp"

namespace binci {

std::string_view method_name(method_id m) {
  switch (m) {
    case method_id::olc: return "olc";
    case method_id::clopper_pearson: return "clopper-pearson";
    case method_id::mid_p: return "mid-p";
    case method_id::wald: return "wald";
    case method_id::agresti_coull: return "agresti-coull";
    case method_id::wilson: return "wilson";
    case method_id::jeffreys: return "jeffreys";
  }
  return "?";
}

std::optional<method_id> parse_method(std::string_view name) {
  for (method_id m : all_methods) {
    if (name == method_name(m)) return m;
  }
  // common aliases
  if (name == "cp") return method_id::clopper_pearson;
  if (name == "midp" || name == "mid_p") return method_id::mid_p;
  if (name == "ac") return method_id::agresti_coull;
  return std::nullopt;
}

std::string_view tail_name(tail_side t) {
  return t == tail_side::upper ? "upper" : "lower";
}

std::optional<tail_side> parse_tail(std::string_view name) {
  if (name == "upper") return tail_side::upper;
  if (name == "lower") return tail_side::lower;
  return std::nullopt;
}

bool satisfies_ordering(const std::vector<double>& e, tail_side tail) {
  if (e.empty()) return false;
  for (size_t i = 1; i < e.size(); ++i) {
    if (!(e[i - 1] < e[i])) return false;
  }
  if (tail == tail_side::upper) {
    return e.front() > 0.0 && e.back() <= 1.0;
  }
  return e.front() == 0.0 && e.back() < 1.0;
}

}  // namespace binci
