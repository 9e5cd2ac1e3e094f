#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#include "cmc/error.hpp"

namespace cmc::ode {

template <std::size_t N>
using State = std::array<double, N>;

template <std::size_t N>
struct StepResult {
  State<N> y;
  double error;  // scaled error norm; accept when <= 1
};

struct Tolerance {
  double rel = 1e-12;
  double abs = 1e-13;
};

/// One Dormand-Prince 5(4) step from (t, y) with step size dt.
template <std::size_t N, class Rhs>
StepResult<N> dopri_step(const Rhs& f, double t, const State<N>& y, double dt, Tolerance tol) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  auto combo = [&](std::initializer_list<std::pair<double, const State<N>*>> terms) {
    State<N> out = y;
    for (const auto& [w, k] : terms) {
      for (std::size_t i = 0; i < N; ++i) out[i] += dt * w * (*k)[i];
    }
    return out;
  };
  const State<N> k1 = f(t, y);
  const State<N> k2 = f(t + c2 * dt, combo({{a21, &k1}}));
  const State<N> k3 = f(t + c3 * dt, combo({{a31, &k1}, {a32, &k2}}));
  const State<N> k4 = f(t + c4 * dt, combo({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
  const State<N> k5 = f(t + c5 * dt, combo({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
  const State<N> k6 =
      f(t + dt, combo({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
  const State<N> y5 = combo({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
  const State<N> k7 = f(t + dt, y5);

  double err = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double e =
        dt * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    const double scale = tol.abs + tol.rel * std::max(std::abs(y[i]), std::abs(y5[i]));
    err = std::max(err, std::abs(e) / scale);
  }
  return {y5, err};
}

/// Adaptive integration from t0 to t1 (either direction). `dt` carries the
/// step-size guess in and the last accepted size out.
template <std::size_t N, class Rhs>
State<N> integrate(const Rhs& f, double t0, State<N> y, double t1, double& dt, Tolerance tol,
                   int max_steps = 1'000'000) {
  const double direction = t1 >= t0 ? 1.0 : -1.0;
  double t = t0;
  double h = std::abs(dt) > 0 ? std::abs(dt) : 1e-3;
  int steps = 0;
  while (direction * (t1 - t) > 0) {
    if (++steps > max_steps) throw Error(ErrorKind::IntegrationFailure, "step budget exhausted");
    const double remaining = std::abs(t1 - t);
    const bool last = h >= remaining;
    const double step = last ? remaining : h;
    const auto r = dopri_step<N>(f, t, y, direction * step, tol);
    if (!std::isfinite(r.error)) {
      h *= 0.25;
      if (h < 1e-14 * std::max(1.0, std::abs(t))) {
        throw Error(ErrorKind::IntegrationFailure, "non-finite state");
      }
      continue;
    }
    if (r.error <= 1.0) {
      t = last ? t1 : t + direction * step;
      y = r.y;
    }
    const double factor = r.error == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(r.error, -0.2), 0.2, 5.0);
    if (r.error <= 1.0 && last) break;
    h = step * factor;
    if (h < 1e-14 * std::max(1.0, std::abs(t))) {
      throw Error(ErrorKind::IntegrationFailure, "step size underflow");
    }
  }
  dt = h;
  return y;
}

}  // namespace cmc::ode
