#include <cmath>

#include <doctest.h>

#include "binci/coverage.hpp"
#include "binci/estimators.hpp"
#include "binci/olc_solver.hpp"
#include "binci/special_functions.hpp"
#include "oracles.hpp"

using namespace binci;

TEST_CASE("coverage_at on simple tables") {
  const auto t1 = olc_table(1, 0.025, tail_side::upper);
  CHECK(coverage_at(t1, 0.5) == 1.0);                              // below u_0 = 0.95
  CHECK(coverage_at(t1, 0.96) == doctest::Approx(0.96).epsilon(1e-12));  // P(X>=1|p) = p

  const auto cp8 = clopper_pearson_table(8, 0.025, tail_side::upper);
  const double just_below_u0 = cp8.endpoints[0] - 1e-9;
  CHECK(coverage_at(cp8, just_below_u0) >= 0.975);
  CHECK_THROWS_AS(coverage_at(cp8, 0.0), std::domain_error);
  CHECK_THROWS_AS(coverage_at(cp8, 1.0), std::domain_error);
}

TEST_CASE("clopper-pearson coverage never falls below nominal") {
  const auto up = clopper_pearson_table(20, 0.025, tail_side::upper);
  const auto lo = clopper_pearson_table(20, 0.025, tail_side::lower);
  for (int k = 1; k < 1000; ++k) {
    const double p = k / 1000.0;
    CHECK(coverage_at(up, p) >= 0.975 - 1e-12);
    CHECK(coverage_at(lo, p) >= 0.975 - 1e-12);
  }
}

TEST_CASE("spike drop equals the pmf at the spike") {
  for (const auto& t : {olc_table(20, 0.025, tail_side::upper),
                        clopper_pearson_table(12, 0.05, tail_side::upper)}) {
    for (int x = 0; x <= t.n; ++x) {
      const double s = t.endpoints[x];
      if (s <= 1e-6 || s >= 1.0 - 1e-6) continue;
      const double drop = coverage_at(t, s - 1e-9) - coverage_at(t, s + 1e-9);
      CHECK(std::fabs(drop - binom_pmf(t.n, x, s)) <= 1e-6);
    }
  }
  // lower tables jump up by the pmf as p crosses a spike
  const auto lo = olc_table(15, 0.025, tail_side::lower);
  for (int x = 1; x <= 15; ++x) {
    const double s = lo.endpoints[x];
    if (s <= 1e-6 || s >= 1.0 - 1e-6) continue;
    const double jump = coverage_at(lo, s + 1e-9) - coverage_at(lo, s - 1e-9);
    CHECK(std::fabs(jump - binom_pmf(15, x, s)) <= 1e-6);
  }
}

TEST_CASE("coverage is monotone between consecutive spikes") {
  const auto t = olc_table(9, 0.025, tail_side::upper);
  for (int i = 1; i <= 9; ++i) {
    const double lo = t.endpoints[i - 1], hi = t.endpoints[i];
    double prev = -1.0;
    for (int k = 1; k <= 100; ++k) {
      const double p = lo + (hi - lo) * k / 101.0;
      const double c = coverage_at(t, p);
      CHECK(c >= prev - 1e-13);
      prev = c;
    }
  }
}

TEST_CASE("interspike averages") {
  const auto olc = olc_table(20, 0.025, tail_side::upper);
  for (int i = 1; i <= 20; ++i) {
    CHECK(std::fabs(interspike_average(olc, i) - 0.975) <= 1e-9);
  }
  const auto cp = clopper_pearson_table(20, 0.025, tail_side::upper);
  for (int i = 1; i <= 20; ++i) {
    CHECK(interspike_average(cp, i) >= 0.975);
  }
  const auto wil = wilson_table(20, 0.025, tail_side::upper);
  double worst = 1.0;
  for (int i = 1; i <= 20; ++i) {
    worst = std::min(worst, interspike_average(wil, i));
  }
  CHECK(worst < 0.975);
  CHECK_THROWS_AS(interspike_average(olc, 0), std::domain_error);
  CHECK_THROWS_AS(interspike_average(olc, 21), std::domain_error);
}

TEST_CASE("is_lcc") {
  for (int n : {1, 8, 20, 50}) {
    CHECK(is_lcc(olc_table(n, 0.025, tail_side::upper)).lcc);
    CHECK(is_lcc(olc_table(n, 0.025, tail_side::lower)).lcc);
  }
  CHECK(is_lcc(midp_table(20, 0.025, tail_side::upper)).lcc);
  CHECK(is_lcc(clopper_pearson_table(20, 0.025, tail_side::upper)).lcc);
  const auto wil = is_lcc(wilson_table(20, 0.025, tail_side::upper));
  CHECK_FALSE(wil.lcc);
  CHECK(wil.reason.empty());  // ordering fine; it fails on the averages
  const auto wald = is_lcc(wald_table(20, 0.025, tail_side::upper));
  CHECK_FALSE(wald.lcc);
  CHECK_FALSE(wald.reason.empty());
}

TEST_CASE("truncated average coverage") {
  const auto olc = truncated_average_coverage(olc_table(20, 0.025, tail_side::upper));
  CHECK(std::fabs(olc.t_u - 0.975) <= 1e-9);
  CHECK(std::fabs(olc.u0 - 0.133) <= 1e-3);
  CHECK(std::fabs(olc.full_range_average - ((1 - olc.u0) * olc.t_u + olc.u0)) <= 1e-15);
  CHECK(std::fabs(olc.two_tail_average - (2 * olc.full_range_average - 1)) <= 1e-15);

  const auto wald = truncated_average_coverage(wald_table(8, 0.05, tail_side::upper));
  CHECK(wald.u0 == 0.0);
  CHECK(std::fabs(wald.t_u - 0.852) <= 1e-3);

  const auto cp = truncated_average_coverage(
      clopper_pearson_table(50, 0.005, tail_side::upper));
  CHECK(std::fabs(cp.t_u - 0.997) <= 1e-3);
  CHECK(std::fabs(cp.u0 - 0.101) <= 1e-3);

  CHECK_THROWS_AS(truncated_average_coverage(olc_table(5, 0.025, tail_side::lower)),
                  std::domain_error);
}

TEST_CASE("t_u of the olc construction equals the nominal level") {
  for (int n : {1, 2, 5, 13, 34, 80}) {
    for (double a : {0.05, 0.025, 0.005}) {
      const auto tr = truncated_average_coverage(olc_table(n, a, tail_side::upper));
      CHECK(std::fabs(tr.t_u - (1.0 - a)) <= 1e-9);
    }
  }
}

TEST_CASE("coverage rmse against published values") {
  CHECK(std::fabs(coverage_rmse(midp_table(20, 0.025, tail_side::upper)) - 0.0091) <=
        1e-4);
  CHECK(std::fabs(coverage_rmse(olc_table(50, 0.005, tail_side::upper)) - 0.0017) <=
        1e-4);
  CHECK(std::fabs(coverage_rmse(wald_table(8, 0.005, tail_side::upper)) - 0.2407) <=
        1e-4);
}

TEST_CASE("expected length and ael") {
  // table rows are keyed by one-tail alpha; the two-tail level is 1 - 2*alpha
  CHECK(std::fabs(ael(method_id::clopper_pearson, 20, 0.10) - 0.317) <= 1e-3);
  CHECK(std::fabs(ael(method_id::olc, 8, 0.01) - 0.617) <= 1e-3);

  // closed form versus brute-force integration of L_n(p)
  for (method_id m : all_methods) {
    const double closed = ael(m, 20, 0.05);
    long double acc = 0.0L;
    const int K = 10000;
    for (int k = 0; k <= K; ++k) {
      const double p = std::min(1.0 - 1e-12, std::max(1e-12, k / double(K)));
      const double L = expected_length(m, 20, 0.05, p);
      acc += (k == 0 || k == K) ? L / 2.0 : L;
    }
    const double brute = static_cast<double>(acc / K);
    CHECK(std::fabs(closed - brute) / closed <= 1e-6);
  }
}

TEST_CASE("wald lengths are clamped to the parameter space") {
  const auto len = two_tail_lengths(method_id::wald, 8, 0.05);
  CHECK(len[0] == 0.0);
  CHECK(len[8] == 0.0);
  // x = 1 lower endpoint is negative; length measures only [0, 1]
  const auto lo = wald_table(8, 0.025, tail_side::lower);
  const auto up = wald_table(8, 0.025, tail_side::upper);
  CHECK(lo.endpoints[1] < 0.0);
  CHECK(len[1] == up.endpoints[1]);  // lower end clamped to 0
  CHECK(len[1] < up.endpoints[1] - lo.endpoints[1]);
  // near x = n the raw upper endpoint exceeds 1 and is clamped
  CHECK(up.endpoints[7] > 1.0);
  CHECK(len[7] == 1.0 - lo.endpoints[7]);
}

TEST_CASE("ael orderings") {
  for (int n : {8, 20, 50}) {
    for (double a : {0.05, 0.025, 0.005}) {
      const double olc = ael(method_id::olc, n, 2 * a);
      const double midp = ael(method_id::mid_p, n, 2 * a);
      const double cp = ael(method_id::clopper_pearson, n, 2 * a);
      CHECK(olc < midp);
      CHECK(midp < cp);
    }
  }
}

TEST_CASE("method metrics bundle") {
  const auto mm = compute_method_metrics(method_id::olc, 20, 0.025, 16);
  CHECK(std::fabs(mm.t_u - 0.975) <= 1e-9);
  CHECK(mm.length_curve.size() == 16);
  CHECK(std::fabs(mm.length_curve[7].second -
                  expected_length(method_id::olc, 20, 0.05, mm.length_curve[7].first)) <=
        1e-12);
}

TEST_CASE("coverage profile") {
  const auto prof = make_coverage_profile(olc_table(10, 0.025, tail_side::upper));
  CHECK(prof.spikes.size() == 11);
  CHECK(prof.gaps.size() == 10);
  for (const auto& g : prof.gaps) {
    CHECK(std::fabs(g.average - 0.975) <= 1e-9);
  }
  // wald: degenerate/duplicate spikes are skipped in the gap list
  const auto wald_prof = make_coverage_profile(wald_table(8, 0.05, tail_side::upper));
  CHECK(wald_prof.spikes.size() == 9);
  for (const auto& g : wald_prof.gaps) {
    CHECK(g.hi > g.lo);
  }
}
