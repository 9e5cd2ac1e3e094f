#pragma once

// Independent re-derivations used as test oracles. Nothing here calls into
// the library, so a shared mistake cannot cancel out.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

// q(t) = c + s t^2 + sigma (h t + t^{1-n})^2, written out term by term.
inline double q(int s, int sigma, double h, double c, int n, double t) {
  const double w = h * t + std::pow(t, 1.0 - n);
  return c + s * t * t + sigma * w * w;
}

inline double dq(int s, int sigma, double h, int n, double t) {
  const double w = h * t + std::pow(t, 1.0 - n);
  const double dw = h + (1.0 - n) * std::pow(t, -static_cast<double>(n));
  return 2.0 * s * t + 2.0 * sigma * w * dw;
}

inline double bisect(const std::function<double(double)>& f, double a, double b) {
  double fa = f(a);
  for (int i = 0; i < 200 && b - a > 0; ++i) {
    const double m = 0.5 * (a + b);
    if (m == a || m == b) break;
    const double fm = f(m);
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

// Sign changes of f on a log-spaced grid over [lo, hi], each refined by bisection.
inline std::vector<double> sign_changes(const std::function<double(double)>& f, double lo, double hi,
                                        int cells = 20000) {
  std::vector<double> out;
  const double ratio = std::pow(hi / lo, 1.0 / cells);
  double a = lo;
  double fa = f(a);
  for (int i = 0; i < cells; ++i) {
    const double b = a * ratio;
    const double fb = f(b);
    if ((fa < 0) != (fb < 0)) out.push_back(bisect(f, a, b));
    a = b;
    fa = fb;
  }
  return out;
}

// Cylinder over a sphere-type frame with radial factor F: lambda = F/r0 and
// mu = -p r0/F, so h = ((n-1) F/r0 - p r0/F)/n with p the sign of the B2 term.
inline double cylinder_h(double F, double r0, int n, int p) {
  return ((n - 1) * F / r0 - p * r0 / F) / n;
}

}  // namespace oracle
