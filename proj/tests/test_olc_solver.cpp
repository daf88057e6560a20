#include <cmath>

#include <doctest.h>

#include "binci/olc_solver.hpp"
#include "binci/special_functions.hpp"
#include "oracles.hpp"

using namespace binci;

TEST_CASE("upper solve, analytic small cases") {
  // n = 1: the average of p over (u_0, 1) is (1 + u_0)/2
  const auto t1 = olc_solve_upper(1, 0.025);
  CHECK(std::fabs(t1.endpoints[0] - 0.95) <= 1e-10);
  CHECK(t1.endpoints[1] == 1.0);

  // n = 2: u_1 solves (1 + u + u^2)/3 = 0.975
  const auto t2 = olc_solve_upper(2, 0.025);
  const double u1_exact = (-1.0 + std::sqrt(8.7)) / 2.0;
  CHECK(std::fabs(t2.endpoints[1] - u1_exact) <= 1e-10);
  CHECK(std::fabs(t2.endpoints[0] - 0.7396) <= 1e-4);

  const auto t20 = olc_solve_upper(20, 0.025);
  CHECK(std::fabs(t20.endpoints[0] - 0.1327) <= 1e-4);
}

TEST_CASE("lower solve, published values") {
  const auto t2 = olc_solve_lower(2, 0.025);
  CHECK(t2.endpoints[0] == 0.0);
  CHECK(std::fabs(t2.endpoints[1] - 0.0252) <= 1e-4);
  CHECK(std::fabs(t2.endpoints[2] - 0.2604) <= 1e-4);

  const auto t6 = olc_solve_lower(6, 0.005);
  CHECK(std::fabs(t6.endpoints[1] - 0.0017) <= 1e-4);
}

TEST_CASE("trace invariants") {
  for (int n : {1, 3, 11, 40}) {
    for (double a : {0.05, 0.025, 0.005}) {
      for (const auto& tr : {olc_solve_upper(n, a), olc_solve_lower(n, a)}) {
        CHECK_FALSE(tr.alpha_outside_guarantee);
        for (int x = 0; x <= n; ++x) {
          CHECK(tr.residuals[x] <= 1e-10);
          CHECK(tr.iterations[x] <= 300);
        }
        for (int x = 0; x < n; ++x) {
          CHECK(tr.endpoints[x] < tr.endpoints[x + 1]);
        }
      }
    }
  }
}

TEST_CASE("defining equation holds post hoc against quadrature") {
  for (int n : {2, 9, 27}) {
    for (double a : {0.05, 0.005}) {
      const auto up = olc_solve_upper(n, a);
      for (int i = 1; i <= n; ++i) {
        const double lo = up.endpoints[i - 1], hi = up.endpoints[i];
        const long double avg =
            oracles::simpson_ld(
                [&](long double p) {
                  return oracles::binom_sf_sum(n, i, p);
                },
                lo, hi, 2000) /
            (hi - lo);
        CHECK(std::fabs(static_cast<double>(avg) - (1.0 - a)) <= 1e-9);
      }
    }
  }
}

TEST_CASE("upper and lower tails are reflections of each other") {
  for (int n : {1, 2, 7, 20, 35}) {
    for (double a : {0.05, 0.025, 0.005}) {
      const auto up = olc_solve_upper(n, a).endpoints;
      const auto lo = olc_solve_lower(n, a).endpoints;
      for (int x = 0; x <= n; ++x) {
        CHECK(std::fabs(lo[x] - (1.0 - up[n - x])) <= 1e-9);
      }
    }
  }
}

TEST_CASE("endpoints increase as alpha decreases") {
  const double chain[] = {0.25, 0.1, 0.05, 0.025, 0.005, 0.001};
  for (int n : {1, 2, 10, 30}) {
    std::vector<std::vector<double>> solved;
    for (double a : chain) solved.push_back(olc_solve_upper(n, a).endpoints);
    for (size_t c = 0; c + 1 < std::size(chain); ++c) {
      for (int j = 0; j < n; ++j) {
        CHECK(solved[c][j] < solved[c + 1][j]);
      }
    }
  }
}

TEST_CASE("solve_upper_from") {
  // from the top anchor it reproduces the full solve
  const auto full = olc_solve_upper(5, 0.025);
  const auto part = olc_solve_upper_from(5, 0.025, 5, 1.0);
  for (int x = 0; x <= 5; ++x) {
    CHECK(part[x] == full.endpoints[x]);
  }

  // from a published intermediate anchor
  const auto from_u1 = olc_solve_upper_from(2, 0.025, 1, 0.9748);
  CHECK(std::fabs(from_u1[0] - 0.7396) <= 2e-4);

  // against an independent quadrature-based re-solve
  const auto got = olc_solve_upper_from(10, 0.05, 10, 1.0);
  const auto want = oracles::olc_upper_resolve_quad(10, 0.05, 2048);
  for (int x = 0; x <= 10; ++x) {
    CHECK(std::fabs(got[x] - want[x]) <= 1e-9);
  }
}

TEST_CASE("alpha outside the guaranteed range") {
  // still solvable here; the trace carries the warning flag
  const auto t = olc_solve_upper(5, 0.30);
  CHECK(t.alpha_outside_guarantee);
  CHECK(t.endpoints[0] > 0.0);

  // unsatisfiable configuration surfaces as bracket_error
  CHECK_THROWS_AS(olc_solve_upper(29, 0.49), bracket_error);

  // an anchor too small for the averaged equation also fails the bracket
  CHECK_THROWS_AS(olc_solve_upper_from(5, 0.025, 1, 0.01), bracket_error);
}

TEST_CASE("olc_table flags nothing and matches the solver") {
  const auto t = olc_table(12, 0.025, tail_side::upper);
  CHECK_FALSE(t.constraint_violation);
  CHECK(t.endpoints == olc_solve_upper(12, 0.025).endpoints);
}
