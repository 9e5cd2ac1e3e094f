#pragma once

#include <functional>

namespace cmc::quadrature {

struct Result {
  double value = 0.0;
  double error = 0.0;  // Kronrod-minus-Gauss estimate summed over panels
  int panels = 0;
  bool converged = false;
};

/// Single 7-point Gauss / 15-point Kronrod panel on [a, b].
Result gauss_kronrod_15(const std::function<double(double)>& f, double a, double b);

/// Globally adaptive G7-K15: repeatedly bisects the panel with the largest
/// error estimate until the total error is below max(abs_tol, rel_tol*|I|).
Result integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-12, double rel_tol = 1e-13, int max_panels = 2000);

}  // namespace cmc::quadrature
