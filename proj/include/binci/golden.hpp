#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "binci/methods.hpp"

namespace binci {

/// FNV-1a 64-bit over the given lines, each terminated with '\n'.
std::uint64_t fnv1a64(const std::vector<std::string>& lines);

/// Golden two-tail interval limits: rows (n, x, lower, upper).
struct golden_interval_row {
  int n = 0;
  int x = 0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Golden per-method metric rows: (alpha, n, method, values...).
struct golden_metric_row {
  double alpha = 0.0;
  int n = 0;
  method_id method{};
  std::vector<double> values;
};

template <class Row>
struct golden_table {
  std::string file;
  bool checksum_ok = false;
  std::uint64_t stored_checksum = 0;
  std::uint64_t computed_checksum = 0;
  std::vector<Row> rows;
};

using golden_intervals = golden_table<golden_interval_row>;
using golden_metrics = golden_table<golden_metric_row>;

/// Loaders throw std::runtime_error when the file is missing or malformed;
/// a checksum mismatch is reported through checksum_ok, not thrown, so that
/// cell-level diffs can still be produced.
golden_intervals load_golden_intervals(const std::string& path);
golden_metrics load_golden_metrics(const std::string& path, int value_count);

}  // namespace binci
