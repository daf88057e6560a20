#pragma once

#include <vector>

namespace binci {

/// Gauss-Legendre nodes and weights on [-1, 1]; exact for polynomials of
/// degree <= 2m - 1.
struct gauss_legendre_rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

gauss_legendre_rule gauss_legendre(int m);

/// Composite Simpson rule with an even number of panels.
template <class F>
double simpson(F&& f, double a, double b, int panels) {
  if (panels % 2 != 0) ++panels;
  const double h = (b - a) / panels;
  double odd = 0.0, even = 0.0;
  for (int k = 1; k < panels; k += 2) odd += f(a + k * h);
  for (int k = 2; k < panels; k += 2) even += f(a + k * h);
  return h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

}  // namespace binci
