#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "cmc/error.hpp"
#include "cmc/immersion_families.hpp"
#include "cmc/moduli_classify.hpp"
#include "reference_points.hpp"

using namespace cmc;

namespace {

double signed_dot(const Vec& a, const Vec& b, int k) {
  double s = 0;
  for (int i = 0; i < a.size(); ++i) s += (i < k ? -1.0 : 1.0) * a[i] * b[i];
  return s;
}

std::vector<double> u_grid(const ImmersionInstance& inst, int count) {
  double lo = -1.0, hi = 1.0;
  if (auto T = inst.period()) {
    lo = 0.0;
    hi = *T;
  } else if (std::isfinite(inst.domain_min())) {
    lo = 0.8 * inst.domain_min();
    hi = 0.8 * inst.domain_max();
  }
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(lo + (hi - lo) * (i + 0.5) / count);
  return out;
}

}  // namespace

TEST_CASE("descriptor table") {
  const auto all = all_descriptors();
  REQUIRE(all.size() == 17);
  std::set<std::string_view> names;
  for (std::size_t i = 0; i < all.size(); ++i) {
    CHECK(static_cast<std::size_t>(all[i].id) == i);
    CHECK(&descriptor(all[i].id) == &all[i]);
    names.insert(to_string(all[i].id));
    CHECK(std::abs(all[i].normal_norm) == 1);
    CHECK(std::abs(all[i].profile_norm) == 1);
    if (all[i].cylinder) CHECK_FALSE(descriptor(all[i].parent).cylinder);
  }
  CHECK(names.size() == 17);
  CHECK(parse_family_id("scyl1") == FamilyId::SCyl1);
  CHECK(parse_family_id("HCYL2") == FamilyId::HCyl2);
  CHECK(parse_family_id("e4") == FamilyId::E4);
  CHECK_THROWS_AS(parse_family_id("S5"), Error);
}

TEST_CASE("principal curvatures") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ug(0.3, 3.0), uh(-2, 2);
  for (int i = 0; i < 200; ++i) {
    const int n = 2 + i % 6;
    const double g = ug(rng), h = uh(rng);
    const auto lm = lambda_mu(g, h, n);
    CHECK(lm.lambda == doctest::Approx(h + 1.0 / std::pow(g, n)).epsilon(1e-14));
    const double mag = std::max({(n - 1) * std::abs(lm.lambda), std::abs(lm.mu), n * std::abs(h)});
    CHECK(std::abs((n - 1) * lm.lambda + lm.mu - n * h) <= 1e-13 * mag);
  }
  CHECK_THROWS_AS(lambda_mu(0.0, 1.0, 3), Error);
  CHECK_THROWS_AS(lambda_mu(1.0, 1.0, 1), Error);
}

TEST_CASE("cylinder radius inverts the mean curvature") {
  for (FamilyId id : {FamilyId::SCyl1, FamilyId::SCyl2, FamilyId::HCyl1, FamilyId::HCyl2}) {
    for (int n = 2; n <= 5; ++n) {
      for (double h : {-2.0, -0.7, 0.0, 0.3, 0.9, 1.2, 3.0}) {
        std::vector<double> radii;
        try {
          radii = solve_cylinder_radius(h, n, id);
        } catch (const Error& e) {
          CHECK(e.kind() == ErrorKind::Unattainable);
          continue;
        }
        for (double r0 : radii) CHECK(cylinder_mean_curvature(r0, n, id) == doctest::Approx(h).epsilon(1e-10).scale(1.0));
      }
    }
  }
  CHECK_THROWS_AS(cylinder_mean_curvature(0.5, 3, FamilyId::SCyl1), Error);
  CHECK_THROWS_AS(cylinder_mean_curvature(2.0, 3, FamilyId::S1), Error);
  // the Lorentzian cylinder never goes below 2 sqrt(n-1)/n
  CHECK_THROWS_AS(solve_cylinder_radius(0.9, 3, FamilyId::HCyl2), Error);
}

TEST_CASE("every reference instance sits on its quadric with a unit normal") {
  for (const auto& p : ref::points()) {
    CAPTURE(to_string(p.id));
    const auto inst = ref::build(p);
    const auto& d = inst.descriptor();
    const int k = inst.ambient().k();
    const auto base = sample_base(inst.base(), 9, 6);
    for (double u : u_grid(inst, 7)) {
      for (const auto& b : base) {
        const Vec phi = inst.evaluate(b.point, u);
        const Vec nu = inst.gauss_map(b.point, u);
        const double scale = std::max(1.0, phi.squaredNorm() * std::max(1.0, nu.squaredNorm()));
        if (!d.flat()) CHECK(std::abs(signed_dot(phi, phi, k) - d.ambient_level) <= 1e-10 * scale);
        CHECK(std::abs(signed_dot(nu, nu, k) - d.normal_norm) <= 1e-10 * scale);
        if (!d.flat()) CHECK(std::abs(signed_dot(phi, nu, k)) <= 1e-10 * scale);
      }
    }
  }
}

TEST_CASE("the frame isometry preserves inner products") {
  const auto p = ref::points()[0];  // S1, hyperbolic frame
  const auto inst = ref::build(p);
  const auto b = sample_base(inst.base(), 2, 1)[0];
  const double T = *inst.period();
  const int k = inst.ambient().k();
  const double u1 = 0.3 * T, u2 = 0.55 * T;
  const double plain = signed_dot(inst.evaluate(b.point, u1), inst.evaluate(b.point, u2), k);
  const double moved =
      signed_dot(inst.evaluate(b.point, u1, 0.7), inst.evaluate(b.point, u2, 0.7), k);
  CHECK(moved == doctest::Approx(plain).epsilon(1e-11));
}

TEST_CASE("angle bookkeeping on a periodic instance") {
  const auto inst = make_instance(FamilyId::S4, 2, 0, 0.8, 5.0);
  const double T = *inst.period();
  const double adv = *inst.angle_advance();
  CHECK(inst.theta(T) - inst.theta(0) == doctest::Approx(adv).epsilon(1e-10));
  CHECK(inst.theta(1.3 + 2 * T) - inst.theta(1.3) == doctest::Approx(2 * adv).epsilon(1e-10));
  for (double u : {0.1, 0.37 * T, 0.81 * T}) {
    const double e = 1e-4;
    const double fd = (inst.theta(u + e) - inst.theta(u - e)) / (2 * e);
    CHECK(inst.angle_rate(u) == doctest::Approx(fd).epsilon(1e-7));
  }
  CHECK_THROWS_AS(inst.height(0.0), Error);

  const auto flat = make_instance(FamilyId::E1, 2, 0, 1.0, 5.0);
  CHECK_THROWS_AS(flat.theta(0.0), Error);
  const double Tf = *flat.period();
  CHECK(flat.height(Tf) - flat.height(0) == doctest::Approx(*flat.angle_advance()).epsilon(1e-10));
}

TEST_CASE("energy relation of the radial function") {
  for (const auto& p : ref::points()) {
    if (descriptor(p.id).cylinder) continue;
    CAPTURE(to_string(p.id));
    const auto inst = ref::build(p);
    const auto id = scalar_identity(inst.descriptor());
    for (double u : u_grid(inst, 11)) {
      const auto f = inst.frame(u);
      const double lhs = f.r_prime * f.r_prime + id.kappa * f.r * f.r * f.lambda * f.lambda;
      const double rhs = id.alpha + id.beta * f.r * f.r;
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8).scale(1.0));
    }
  }
}

TEST_CASE("binding checks") {
  ProfilePolynomial q(ProfileFamily::SphereP, 0.8, 5.0, 2);
  const auto cls = classify_profile(q);
  auto sol = std::make_shared<const ProfileSolution>(solve_periodic(q, *cls.t1, *cls.t2));
  CHECK_NOTHROW(ImmersionInstance::from_solution(FamilyId::S4, 0, sol));
  auto kind_of = [&](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::ContractViolation;
  };
  CHECK(kind_of([&] { ImmersionInstance::from_solution(FamilyId::S1, 1, sol); }) == ErrorKind::FamilyMismatch);
  CHECK(kind_of([&] { ImmersionInstance::from_solution(FamilyId::S4, 3, sol); }) == ErrorKind::OutOfValidity);
  CHECK(kind_of([&] { ImmersionInstance::from_solution(FamilyId::SCyl1, 1, sol); }) == ErrorKind::FamilyMismatch);

  const auto inst = ImmersionInstance::from_solution(FamilyId::S4, 0, sol);
  Vec off = Vec::Zero(inst.ambient().dim());
  off[0] = 0.5;
  CHECK(kind_of([&] { inst.evaluate(off, 0.0); }) == ErrorKind::BasePointOffQuadric);

  const auto local = make_instance(FamilyId::S3, 3, 1, 0.5, 1.0);
  const auto y = sample_base(local.base(), 1, 1)[0].point;
  CHECK(kind_of([&] { local.evaluate(y, local.domain_max() + 1.0); }) == ErrorKind::DomainExceeded);
}

TEST_CASE("perturbation shifts the principal curvatures") {
  const auto inst = make_instance(FamilyId::S4, 2, 0, 0.8, 5.0);
  const auto moved = inst.perturbed(1.0, 1e-3);
  CHECK(moved.h() == doctest::Approx(0.801).epsilon(1e-14));
  const auto a = inst.frame(0.4), b = moved.frame(0.4);
  CHECK(b.lambda - a.lambda == doctest::Approx(1e-3).epsilon(1e-9));
  CHECK(b.r == a.r);
  const auto scaled = inst.perturbed(1.01, 0.0);
  CHECK(*scaled.angle_advance() == doctest::Approx(1.01 * *inst.angle_advance()).epsilon(1e-12));
}
