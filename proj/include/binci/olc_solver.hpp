#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "binci/methods.hpp"

namespace binci {

/// Thrown when the averaged-coverage equation has no root on the admissible
/// bracket, i.e. the requested alpha is outside the solvable range.
struct bracket_error : std::runtime_error {
  explicit bracket_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct olc_solve_trace {
  int n = 0;
  double alpha = 0.0;
  tail_side tail = tail_side::upper;
  std::vector<double> endpoints;   // n+1 values indexed by x
  std::vector<double> residuals;   // |gap average - (1-alpha)| per solved endpoint
  std::vector<int> iterations;     // bisection steps per solved endpoint
  bool alpha_outside_guarantee = false;  // alpha outside (0.0001, 0.27)
};

/// Upper-tail endpoints: u_n = 1, then u_{n-1}, ..., u_0 are determined
/// sequentially so that the average of P(X >= i | p) over (u_{i-1}, u_i)
/// equals 1 - alpha.
olc_solve_trace olc_solve_upper(int n, double alpha);

/// Lower-tail endpoints: l_0 = 0, then l_1, ..., l_n so that the average of
/// P(X <= i | p) over (l_i, l_{i+1}) equals 1 - alpha.
olc_solve_trace olc_solve_lower(int n, double alpha);

/// Runs the upper-tail recursion downward from an arbitrary anchor u_j;
/// returns u_0..u_j.
std::vector<double> olc_solve_upper_from(int n, double alpha, int j, double u_j);

endpoint_table olc_table(int n, double alpha, tail_side tail);

}  // namespace binci
