#pragma once

#include <string>
#include <vector>

namespace binci {

struct check_result {
  std::string id;
  std::string grid;   // what was swept
  bool pass = false;
  double worst_violation = 0.0;  // most negative margin / largest abs diff
  std::string worst_location;
  std::string note;   // scoping statements, probe findings
};

struct golden_diff {
  std::string table_id;
  std::string cell;
  double expected = 0.0;
  double computed = 0.0;
  double abs_diff = 0.0;
};

struct verification_report {
  int schema_version = 1;
  int n_max = 0;
  std::string data_dir;
  std::vector<check_result> checks;       // fixed declared order
  std::vector<golden_diff> golden_diffs;  // cells exceeding their tolerance
  bool all_pass = false;
};

struct verify_options {
  int n_max = 100;        // grid sweeps cover n = 1..n_max
  std::string data_dir;   // directory holding the golden fixtures
  bool parallel = true;   // distribute grid cells over OpenMP threads
};

verification_report run_verification(const verify_options& opt);

std::string report_to_text(const verification_report& rep);

/// Serialized JSON (2-space indent) with a stable schema.
std::string report_to_json(const verification_report& rep);

}  // namespace binci
