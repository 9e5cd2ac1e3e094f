#include "cmc/quadrature.hpp"

#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace cmc::quadrature {

namespace {

// Abscissae on [0,1] of the 15-point Kronrod extension; odd indices are the
// 7-point Gauss nodes.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  Result r;
  bool operator<(const Panel& o) const { return r.error < o.r.error; }
};

}  // namespace

Result gauss_kronrod_15(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f_mid = f(mid);
  double kronrod = f_mid * kKronrodWeights[7];
  double gauss = f_mid * kGaussWeights[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kNodes[i];
    const double pair = f(mid - dx) + f(mid + dx);
    kronrod += kKronrodWeights[i] * pair;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
  }
  Result r;
  r.value = kronrod * half;
  r.error = std::abs((kronrod - gauss) * half);
  r.panels = 1;
  r.converged = true;
  return r;
}

Result integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                 double rel_tol, int max_panels) {
  if (a == b) return {0.0, 0.0, 0, true};
  std::priority_queue<Panel> heap;
  Panel first{a, b, gauss_kronrod_15(f, a, b)};
  double total = first.r.value;
  double error = first.r.error;
  heap.push(first);
  int panels = 1;
  while (error > std::max(abs_tol, rel_tol * std::abs(total)) && panels < max_panels) {
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      heap.push(worst);
      break;
    }
    Panel left{worst.a, mid, gauss_kronrod_15(f, worst.a, mid)};
    Panel right{mid, worst.b, gauss_kronrod_15(f, mid, worst.b)};
    total += left.r.value + right.r.value - worst.r.value;
    error += left.r.error + right.r.error - worst.r.error;
    heap.push(left);
    heap.push(right);
    ++panels;
  }
  // Resum to drop the drift of the running updates.
  total = 0.0;
  error = 0.0;
  std::vector<Panel> all;
  all.reserve(heap.size());
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  for (auto it = all.rbegin(); it != all.rend(); ++it) {
    total += it->r.value;
    error += it->r.error;
  }
  return {total, error, panels, error <= std::max(abs_tol, rel_tol * std::abs(total))};
}

}  // namespace cmc::quadrature
