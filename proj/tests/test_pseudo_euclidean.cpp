#include "doctest.h"

#include <cmath>
#include <random>

#include "cmc/error.hpp"
#include "cmc/pseudo_euclidean.hpp"

using namespace cmc;

TEST_CASE("inner product matches the signed sum") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  for (int dim = 1; dim <= 6; ++dim) {
    for (int k = 0; k <= dim; ++k) {
      AmbientSignature sig(dim, k);
      Vec v(dim), w(dim);
      for (int i = 0; i < dim; ++i) {
        v[i] = nd(rng);
        w[i] = nd(rng);
      }
      double expected = 0;
      for (int i = 0; i < dim; ++i) expected += (i < k ? -1.0 : 1.0) * v[i] * w[i];
      CHECK(inner(v, w, sig) == doctest::Approx(expected).epsilon(1e-14));
      CHECK(inner(v, w, sig) == doctest::Approx(inner(w, v, sig)).epsilon(1e-15));
    }
  }
}

TEST_CASE("signature contracts") {
  AmbientSignature sig(4, 1);
  CHECK(sig.axis_sign(1) == -1);
  CHECK(sig.axis_sign(2) == 1);
  CHECK_THROWS_AS(sig.axis_sign(0), Error);
  CHECK_THROWS_AS(sig.axis_sign(5), Error);
  CHECK_THROWS_AS(AmbientSignature(3, 4), Error);
  CHECK_THROWS_AS(AmbientSignature(0, 0), Error);
  Vec a(3);
  CHECK_THROWS_AS(inner(a, Vec(4), sig), Error);
}

TEST_CASE("quadric slots and emptiness") {
  QuadricSpec s(AmbientSignature(5, 2), 1, {2, 4});
  CHECK(s.free_negative_slots() == std::vector<int>{1});
  CHECK(s.free_positive_slots() == std::vector<int>{3, 5});
  CHECK(s.manifold_dim() == 2);
  CHECK(s.non_empty());

  // all free slots timelike: <x,x> = +1 has no points, and vice versa
  CHECK_FALSE(QuadricSpec(AmbientSignature(3, 3), 1).non_empty());
  CHECK_FALSE(QuadricSpec(AmbientSignature(3, 0), -1).non_empty());
  CHECK(QuadricSpec(AmbientSignature(3, 1), -1).non_empty());

  CHECK_THROWS_AS(QuadricSpec(AmbientSignature(3, 0), 0), Error);
  CHECK_THROWS_AS(QuadricSpec(AmbientSignature(3, 0), 1, {1, 1}), Error);
  try {
    QuadricSpec(AmbientSignature(3, 0), 1, {1, 2});
    FAIL("expected DegenerateQuadric");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateQuadric);
  }
}

TEST_CASE("base samples lie on the quadric with unit tangents") {
  struct Case {
    int dim, k, level;
    std::vector<int> zeroed;
  };
  const Case cases[] = {
      {3, 0, 1, {}}, {4, 1, 1, {}}, {4, 1, -1, {}}, {5, 2, -1, {3}}, {5, 3, 1, {1}}, {6, 2, 1, {2, 5}},
  };
  for (const auto& cs : cases) {
    QuadricSpec q(AmbientSignature(cs.dim, cs.k), cs.level, cs.zeroed);
    const auto samples = sample_base(q, 42, 40);
    REQUIRE(samples.size() == 40);
    bool saw_pos = false, saw_neg = false;
    for (const auto& s : samples) {
      const auto& sig = q.signature();
      double scale = 0;
      for (int i = 0; i < cs.dim; ++i) scale += s.point[i] * s.point[i];
      CHECK(std::abs(inner(s.point, s.point, sig) - cs.level) <= 1e-12 * std::max(1.0, scale));
      for (int z : cs.zeroed) {
        CHECK(s.point[z - 1] == 0.0);
        CHECK(s.tangent[z - 1] == 0.0);
      }
      CHECK(std::abs(inner(s.point, s.tangent, sig)) <= 1e-12 * std::max(1.0, scale));
      CHECK(std::abs(inner(s.tangent, s.tangent, sig) - s.tangent_norm) <= 1e-12 * std::max(1.0, scale));
      saw_pos |= s.tangent_norm > 0;
      saw_neg |= s.tangent_norm < 0;
    }
    CHECK(saw_pos);
    // a timelike tangent exists once two timelike free slots, or one timelike
    // free slot on a spacelike level set, are available
    const int neg = static_cast<int>(q.free_negative_slots().size());
    if ((cs.level > 0 && neg >= 1) || neg >= 2) CHECK(saw_neg);
  }
}

TEST_CASE("base sampling is deterministic per seed") {
  QuadricSpec q(AmbientSignature(4, 1), -1);
  const auto a = sample_base(q, 3, 5);
  const auto b = sample_base(q, 3, 5);
  const auto c = sample_base(q, 4, 5);
  for (int i = 0; i < 5; ++i) CHECK(a[i].point == b[i].point);
  CHECK_FALSE(a[0].point == c[0].point);
  try {
    sample_base(QuadricSpec(AmbientSignature(3, 3), 1), 1, 1);
    FAIL("expected EmptyQuadric");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyQuadric);
  }
}

TEST_CASE("unit axis") {
  AmbientSignature sig(4, 1);
  const Vec e = unit_axis(sig, 3);
  CHECK(e.size() == 4);
  CHECK(e[2] == 1.0);
  CHECK(e.sum() == 1.0);
  CHECK(inner(unit_axis(sig, 1), unit_axis(sig, 1), sig) == -1.0);
}
