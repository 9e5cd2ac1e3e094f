#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "cmc/error.hpp"
#include "cmc/moduli_classify.hpp"
#include "cmc/profile_ode.hpp"
#include "oracles.hpp"

using namespace cmc;

namespace {

struct Signs {
  ProfileFamily family;
  int s, sigma;
};
constexpr Signs kSigns[] = {
    {ProfileFamily::SphereQ, -1, 1}, {ProfileFamily::SphereP, -1, -1}, {ProfileFamily::HypQ, 1, 1},
    {ProfileFamily::HypP, 1, -1},    {ProfileFamily::EucQ, 0, 1},      {ProfileFamily::EucP, 0, -1},
};

// T = 2 int_{t1}^{t2} dt / sqrt(q) with t = m + w sin(phi), composite Simpson in phi.
double period_oracle(int s, int sigma, double h, double c, int n, double t1, double t2) {
  const double m = 0.5 * (t1 + t2), w = 0.5 * (t2 - t1);
  const int N = 20000;
  const double a = -std::numbers::pi / 2, dphi = std::numbers::pi / N;
  auto f = [&](double phi) {
    if (std::abs(std::abs(phi) - std::numbers::pi / 2) < 1e-15) {
      // limit w cos / sqrt(q) as phi -> +-pi/2: q ~ |q'(t_end)| w cos^2 / 2
      const double te = phi > 0 ? t2 : t1;
      return std::sqrt(2.0 * w / std::abs(oracle::dq(s, sigma, h, n, te)));
    }
    const double t = m + w * std::sin(phi);
    return w * std::cos(phi) / std::sqrt(oracle::q(s, sigma, h, c, n, t));
  };
  double sum = f(a) + f(a + N * dphi);
  for (int i = 1; i < N; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * dphi);
  return 2.0 * sum * dphi / 3.0;
}

}  // namespace

TEST_CASE("q and its derivatives match the expanded formula") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ut(0.2, 4.0), uh(-2.0, 2.0), uc(-3.0, 3.0);
  for (const auto& fs : kSigns) {
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 2 + trial % 5;
      const double h = uh(rng), t = ut(rng);
      double c = uc(rng);
      if (c == 0) c = 1;
      ProfilePolynomial q(fs.family, h, c, n);
      const auto v = q.eval(t);
      const double ref = oracle::q(fs.s, fs.sigma, h, c, n, t);
      CHECK(v.value == doctest::Approx(ref).epsilon(1e-12).scale(q.scale()));
      CHECK(v.derivative == doctest::Approx(oracle::dq(fs.s, fs.sigma, h, n, t)).epsilon(1e-11));
      const double e = 1e-5 * t;
      const double fd =
          (oracle::dq(fs.s, fs.sigma, h, n, t + e) - oracle::dq(fs.s, fs.sigma, h, n, t - e)) / (2 * e);
      CHECK(q.second_derivative(t) == doctest::Approx(fd).epsilon(1e-6));

      const auto coeffs = q.cleared_coefficients();
      CHECK(coeffs.size() <= static_cast<std::size_t>(2 * n + 1));
      double poly = 0;
      for (std::size_t i = coeffs.size(); i-- > 0;) poly = poly * t + coeffs[i];
      CHECK(poly == doctest::Approx(std::pow(t, 2 * n - 2) * ref).epsilon(1e-11).scale(1.0));
    }
  }
}

TEST_CASE("family names and domain checks") {
  for (const auto& fs : kSigns) CHECK(parse_profile_family(to_string(fs.family)) == fs.family);
  CHECK(parse_profile_family("hyp-q") == ProfileFamily::HypQ);
  CHECK_THROWS_AS(parse_profile_family("sphere"), Error);
  ProfilePolynomial q(ProfileFamily::SphereQ, 0.3, 1.0, 3);
  CHECK_THROWS_AS(q.eval(0.0), Error);
  CHECK_THROWS_AS(q.eval(-1.0), Error);
  CHECK_THROWS_AS(ProfilePolynomial(ProfileFamily::SphereQ, 0.3, 1.0, 1), Error);
  CHECK_THROWS_AS(ProfilePolynomial(ProfileFamily::EucP, 0.3, 0.0, 3), Error);
}

TEST_CASE("positive roots agree with a dense sign scan") {
  struct P {
    ProfileFamily f;
    int s, sigma;
    double h, c;
    int n;
  };
  const P pts[] = {
      {ProfileFamily::SphereQ, -1, 1, -0.95, 1.28, 3}, {ProfileFamily::SphereP, -1, -1, 0.8, 5.0, 2},
      {ProfileFamily::HypQ, 1, 1, 0.5, -1.0, 3},       {ProfileFamily::HypP, 1, -1, 0.5, 1.0, 3},
      {ProfileFamily::EucP, 0, -1, 1.0, 5.0, 3},        {ProfileFamily::EucQ, 0, 1, -1.0, -0.5, 3},
      {ProfileFamily::SphereQ, -1, 1, 1.5, -2.0, 4},
  };
  for (const auto& p : pts) {
    ProfilePolynomial q(p.f, p.h, p.c, p.n);
    const double bound = default_root_bound(q);
    const auto roots = positive_roots(q);
    const auto ref = oracle::sign_changes(
        [&](double t) { return oracle::q(p.s, p.sigma, p.h, p.c, p.n, t); }, 1e-3, bound, 200000);
    REQUIRE(roots.size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
      CHECK_FALSE(roots[i].double_root);
      CHECK(roots[i].t == doctest::Approx(ref[i]).epsilon(1e-12));
    }
    const auto crit = critical_points(q);
    const auto cref = oracle::sign_changes([&](double t) { return oracle::dq(p.s, p.sigma, p.h, p.n, t); },
                                           1e-3, bound, 200000);
    REQUIRE(crit.size() == cref.size());
    for (std::size_t i = 0; i < crit.size(); ++i) CHECK(crit[i] == doctest::Approx(cref[i]).epsilon(1e-10));
  }
}

TEST_CASE("a tangency is reported once as a double root") {
  const double h = -0.95;
  const int n = 3;
  const auto cp = sphere_critical_points_closed_form(h, n);
  REQUIRE(cp.v1);
  const double c = sphere_double_root_c(*cp.v1, h, n);
  // the additive shift makes q vanish at v1 to first order too
  CHECK(std::abs(oracle::q(-1, 1, h, c, n, *cp.v1)) < 1e-12);
  const auto roots = positive_roots(ProfilePolynomial(ProfileFamily::SphereQ, h, c, n));
  const auto it = std::find_if(roots.begin(), roots.end(), [](const Root& r) { return r.double_root; });
  REQUIRE(it != roots.end());
  CHECK(it->t == doctest::Approx(*cp.v1).epsilon(1e-9));
}

TEST_CASE("threshold constants") {
  // n = 3, h = -0.95 reference values from the oracle pipeline
  const auto cp = sphere_critical_points_closed_form(-0.95, 3);
  REQUIRE(cp.v1);
  CHECK(*cp.v1 == doctest::Approx(1.8821).epsilon(1e-4));
  CHECK(threshold_c1(-0.95, 3) == doctest::Approx(1.2752).epsilon(1e-4));
  CHECK(v1_over_sqrt_c1_squared(-0.95, 3) == doctest::Approx(2.778).epsilon(1e-3));
  CHECK_THROWS_AS(threshold_c1(-0.9, 3), Error);
  CHECK_THROWS_AS(threshold_c1(-1.0, 3), Error);

  for (int n = 3; n <= 6; ++n) {
    const double v = std::pow((n - 1.0) / (n - 2.0), 1.0 / n);
    CHECK(threshold_c0_h_minus_one(n) == doctest::Approx(-oracle::q(-1, 1, -1.0, 0.0, n, v)).epsilon(1e-12));
  }
  for (int n = 3; n <= 6; ++n) {
    const double closed = n * std::pow(n - 2.0, (n - 2.0) / n) * std::pow(n - 1.0, (2.0 - 2.0 * n) / n);
    CHECK(threshold_c0_h_minus_one(n) == doctest::Approx(closed).epsilon(1e-12));
  }
  CHECK(threshold_c0_h_minus_one(3) == doctest::Approx(1.19055).epsilon(1e-5));
  CHECK_THROWS_AS(threshold_c0_h_minus_one(2), Error);

  for (double h : {1.5, -1.5, 3.0}) {
    const auto crit = oracle::sign_changes([&](double t) { return oracle::dq(-1, 1, h, 3, t); }, 1e-3, 1e3);
    REQUIRE(crit.size() == 1);
    CHECK(threshold_c0_outer(h, 3) == doctest::Approx(oracle::q(-1, 1, h, 0.0, 3, crit[0])).epsilon(1e-9));
  }
  CHECK_THROWS_AS(threshold_c0_outer(0.5, 3), Error);
  CHECK_THROWS_AS(thresholds(0.0, 3), Error);
}

TEST_CASE("periodic solutions: two periods, symmetry and energy") {
  struct P {
    ProfileFamily f;
    int s, sigma;
    double h, c;
    int n;
  };
  const P pts[] = {
      {ProfileFamily::SphereP, -1, -1, 0.8, 5.0, 2},
      {ProfileFamily::SphereQ, -1, 1, -0.95, 1.28, 3},
      {ProfileFamily::EucP, 0, -1, 1.0, 5.0, 3},
  };
  for (const auto& p : pts) {
    ProfilePolynomial q(p.f, p.h, p.c, p.n);
    const auto cls = classify_profile(q);
    REQUIRE(cls.solution_class == SolutionClass::Periodic);
    const double t1 = *cls.t1, t2 = *cls.t2;
    const double T_ref = period_oracle(p.s, p.sigma, p.h, p.c, p.n, t1, t2);
    CHECK(period_by_quadrature(q, t1, t2) == doctest::Approx(T_ref).epsilon(1e-9));
    CHECK(period_by_turning_point(q, t1) == doctest::Approx(T_ref).epsilon(1e-9));

    const auto sol = solve_periodic(q, t1, t2);
    const auto& kind = std::get<PeriodicKind>(sol.kind());
    CHECK(kind.period == doctest::Approx(kind.period_ode).epsilon(1e-8));
    const double T = kind.period;
    CHECK(sol.state(0).g == doctest::Approx(t1).epsilon(1e-12));
    CHECK(sol.state(0.5 * T).g == doctest::Approx(t2).epsilon(1e-10));
    double worst = 0;
    for (int i = 0; i < 997; ++i) {
      const double u = -2 * T + 5 * T * i / 997.0;
      const auto st = sol.state(u);
      const double qv = oracle::q(p.s, p.sigma, p.h, p.c, p.n, st.g);
      worst = std::max(worst, std::abs(st.g_prime * st.g_prime - qv) / std::max({1.0, qv, st.g_prime * st.g_prime}));
      const auto fwd = sol.state(u + T);
      const auto ref = sol.state(-u);
      CHECK(fwd.g == doctest::Approx(st.g).epsilon(1e-11));
      CHECK(ref.g == doctest::Approx(st.g).epsilon(1e-11));
      CHECK(ref.g_prime == doctest::Approx(-st.g_prime).epsilon(1e-9).scale(1.0));
    }
    CHECK(worst <= 1e-8);
    CHECK(sol.energy_residual_max() <= 1e-8);
    CHECK(sol.min_g() == doctest::Approx(t1).epsilon(1e-12));
    CHECK(sol.max_g() == doctest::Approx(t2).epsilon(1e-10));
  }
}

TEST_CASE("periodic solve rejects bad brackets") {
  ProfilePolynomial q(ProfileFamily::SphereP, 0.8, 5.0, 2);
  const auto roots = positive_roots(q);
  REQUIRE(roots.size() == 2);
  CHECK_THROWS_AS(solve_periodic(q, roots[1].t, roots[0].t), Error);
  CHECK_THROWS_AS(solve_periodic(q, roots[0].t, roots[1].t + 0.1), Error);
  try {
    solve_periodic(q, 0.5 * roots[0].t, roots[1].t);
    FAIL("expected InvalidBracket");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidBracket);
  }

  // double root at v1 next to a simple root
  const auto cp = sphere_critical_points_closed_form(-0.95, 3);
  ProfilePolynomial qd(ProfileFamily::SphereQ, -0.95, sphere_double_root_c(*cp.v1, -0.95, 3), 3);
  const auto rd = positive_roots(qd);
  const auto dbl = std::find_if(rd.begin(), rd.end(), [](const Root& r) { return r.double_root; });
  REQUIRE(dbl != rd.end());
  REQUIRE(dbl != rd.begin());
  CHECK_THROWS_AS(solve_periodic(qd, std::prev(dbl)->t, dbl->t), DoubleRootError);
}

TEST_CASE("unbounded solutions grow from their root") {
  // HypP, n = 3, h = 0.5, c = 1: q -> +inf like (1 - h^2) t^2
  ProfilePolynomial q(ProfileFamily::HypP, 0.5, 1.0, 3);
  const auto cls = classify_profile(q);
  REQUIRE(cls.solution_class == SolutionClass::Unbounded);
  const double a = *cls.root;
  const auto sol = solve_unbounded(q, a, 40.0);
  const auto& kind = std::get<UnboundedKind>(sol.kind());
  // estimated from q(t)/t^2 far out; the exact limit is 1 - h^2
  CHECK(kind.asymptotic_coeff == doctest::Approx(0.75).epsilon(1e-3));
  CHECK_FALSE(kind.linear_growth);
  CHECK(sol.state(0).g == doctest::Approx(a).epsilon(1e-12));
  double prev = a;
  for (int i = 1; i <= 100; ++i) {
    const double u = kind.u_max * i / 100.0;
    const auto st = sol.state(u);
    CHECK(st.g > prev);
    CHECK(sol.state(-u).g == doctest::Approx(st.g).epsilon(1e-12));
    const double qv = oracle::q(1, -1, 0.5, 1.0, 3, st.g);
    CHECK(std::abs(st.g_prime * st.g_prime - qv) <= 1e-8 * std::max({1.0, qv}));
    prev = st.g;
  }
  CHECK_THROWS_AS(sol.state(kind.u_max * 1.5), Error);
  CHECK_THROWS_AS(solve_unbounded(q, a * 1.1, 40.0), Error);
}

TEST_CASE("linear growth is recognised") {
  // EucQ at n = 2 has q(t) = c + (h t + 1/t)^2 -> c + 2h + h^2 t^2; with h = 0 q -> c
  ProfilePolynomial q(ProfileFamily::EucQ, 0.0, 0.5, 2);
  CHECK(q(1e6) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("local arcs stay inside their window") {
  ProfilePolynomial q(ProfileFamily::HypQ, 0.5, -1.0, 3);
  const double lo = 1.0, hi = 3.0;
  const auto sol = solve_local(q, 2.0, lo, hi, 1.0);
  const auto& kind = std::get<LocalKind>(sol.kind());
  CHECK(kind.u_min < 0);
  CHECK(kind.u_max > 0);
  CHECK(sol.state(0).g == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(sol.state(0).g_prime > 0);
  for (int i = 0; i <= 50; ++i) {
    const double u = kind.u_min + (kind.u_max - kind.u_min) * i / 50.0;
    const auto st = sol.state(u);
    CHECK(st.g > lo);
    CHECK(st.g < hi);
    CHECK(sol.energy_residual({u, st.g, st.g_prime}) <= 1e-8);
  }
  CHECK_THROWS_AS(sol.state(kind.u_max + 0.1), Error);
  CHECK_THROWS_AS(solve_local(q, 4.0, lo, hi, 1.0), Error);
}

TEST_CASE("constant solutions sit on double roots") {
  const double cd = s4_double_root_c(0.8, 2);
  ProfilePolynomial q(ProfileFamily::SphereP, 0.8, cd, 2);
  const auto cls = classify_profile(q);
  REQUIRE(cls.solution_class == SolutionClass::Constant);
  const auto sol = constant_solution(q, *cls.root);
  CHECK(sol.constant());
  CHECK(sol.state(17.0).g == *cls.root);
  CHECK(sol.state(-3.0).g_prime == 0.0);
  CHECK_THROWS_AS(constant_solution(q, *cls.root * 1.1), Error);
}
