#include <atomic>
#include <vector>

#include <doctest.h>

#include "binci/olc_solver.hpp"
#include "binci/parallel.hpp"
#include "binci/verification.hpp"

using namespace binci;

#ifndef BINCI_DATA_DIR
#define BINCI_DATA_DIR "data"
#endif

TEST_CASE("for_each_index covers every slot exactly once") {
  std::vector<int> hits(257, 0);
  for_each_index(257, true, [&](int i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
}

TEST_CASE("parallel sweep results are bit-identical to the serial sweep") {
  constexpr int n_count = 40;
  std::vector<std::vector<double>> serial(n_count), parallel(n_count);
  for_each_index(n_count, false, [&](int k) {
    serial[k] = olc_solve_upper(k + 1, 0.025).endpoints;
  });
  for_each_index(n_count, true, [&](int k) {
    parallel[k] = olc_solve_upper(k + 1, 0.025).endpoints;
  });
  for (int k = 0; k < n_count; ++k) {
    CHECK(serial[k] == parallel[k]);
  }
}

TEST_CASE("verification report is identical under serial and parallel execution") {
  verify_options opt;
  opt.n_max = 15;
  opt.data_dir = BINCI_DATA_DIR;
  opt.parallel = false;
  const auto serial = run_verification(opt);
  opt.parallel = true;
  const auto parallel = run_verification(opt);
  CHECK(report_to_text(serial) == report_to_text(parallel));
  CHECK(report_to_json(serial) == report_to_json(parallel));
}

TEST_CASE("exceptions inside parallel loops propagate") {
  CHECK_THROWS_AS(for_each_index(64, true,
                                 [&](int i) {
                                   if (i == 13) throw std::domain_error("boom");
                                 }),
                  std::domain_error);
}
