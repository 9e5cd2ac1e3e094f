#include "cmc/pseudo_euclidean.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "cmc/error.hpp"

namespace cmc {

AmbientSignature::AmbientSignature(int dim, int k) : dim_(dim), k_(k) {
  if (dim < 1 || k < 0 || k > dim) {
    throw Error(ErrorKind::ContractViolation,
                "signature requires 0 <= k <= dim, dim >= 1 (dim=" + std::to_string(dim) +
                    ", k=" + std::to_string(k) + ")");
  }
}

int AmbientSignature::axis_sign(int slot) const {
  if (slot < 1 || slot > dim_) {
    throw Error(ErrorKind::ContractViolation, "slot " + std::to_string(slot) + " out of range");
  }
  return slot <= k_ ? -1 : 1;
}

double inner(const Vec& v, const Vec& w, const AmbientSignature& sig) {
  if (v.size() != sig.dim() || w.size() != sig.dim()) {
    throw Error(ErrorKind::ContractViolation,
                "inner product dimension mismatch: " + std::to_string(v.size()) + ", " +
                    std::to_string(w.size()) + " vs " + std::to_string(sig.dim()));
  }
  const int k = sig.k();
  return -v.head(k).dot(w.head(k)) + v.tail(sig.dim() - k).dot(w.tail(sig.dim() - k));
}

QuadricSpec::QuadricSpec(AmbientSignature signature, int level, std::vector<int> zeroed_slots)
    : signature_(signature), level_(level), zeroed_(std::move(zeroed_slots)) {
  if (level != 1 && level != -1) {
    throw Error(ErrorKind::ContractViolation, "quadric level must be +1 or -1");
  }
  std::vector<int> sorted = zeroed_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorKind::ContractViolation, "zeroed slots must be distinct");
  }
  for (int s : sorted) {
    if (s < 1 || s > signature_.dim()) {
      throw Error(ErrorKind::ContractViolation, "zeroed slot " + std::to_string(s) + " out of range");
    }
  }
  for (int s = 1; s <= signature_.dim(); ++s) {
    if (std::binary_search(sorted.begin(), sorted.end(), s)) continue;
    (signature_.axis_sign(s) < 0 ? free_neg_ : free_pos_).push_back(s);
  }
  if (manifold_dim() < 1) {
    throw Error(ErrorKind::DegenerateQuadric, "quadric of dimension < 1 has no cross-section");
  }
}

bool QuadricSpec::non_empty() const noexcept {
  return level_ > 0 ? !free_pos_.empty() : !free_neg_.empty();
}

QuadricResidual quadric_residual(const Vec& x, const QuadricSpec& q) {
  QuadricResidual out{inner(x, x, q.signature()) - q.level(), 0.0};
  for (int s : q.zeroed_slots()) out.zeroed_slot_max = std::max(out.zeroed_slot_max, std::abs(x(s - 1)));
  return out;
}

Vec unit_axis(const AmbientSignature& sig, int slot) {
  Vec e = Vec::Zero(sig.dim());
  sig.axis_sign(slot);
  e(slot - 1) = 1.0;
  return e;
}

namespace {

// Uniform double in [0,1) built from the raw 64-bit stream so output does not
// depend on the standard library's distribution implementation.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Euclidean unit vector supported on `slots`, orthogonal to `avoid` (which
  // is itself unit and supported on the same slots, or zero).
  Vec unit_on(const std::vector<int>& slots, int dim, const Vec* avoid) {
    for (;;) {
      Vec v = Vec::Zero(dim);
      for (int s : slots) v(s - 1) = uniform(-1.0, 1.0);
      if (avoid != nullptr) v -= v.dot(*avoid) * *avoid;
      const double norm = v.norm();
      if (norm > 0.25) return v / norm;
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace

std::vector<BaseSample> sample_base(const QuadricSpec& q, std::uint64_t seed, int count) {
  if (!q.non_empty()) {
    throw Error(ErrorKind::EmptyQuadric, q.level() < 0 ? "level -1 needs a timelike free slot"
                                                       : "level +1 needs a spacelike free slot");
  }
  const int dim = q.signature().dim();
  const auto& neg = q.free_negative_slots();
  const auto& pos = q.free_positive_slots();
  // Slots of the same causal type as the point's dominant axis, and the rest.
  const auto& same = q.level() > 0 ? pos : neg;
  const auto& other = q.level() > 0 ? neg : pos;
  const int same_sign = q.level();

  Stream rng(seed);
  std::vector<BaseSample> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) {
    const Vec a = rng.unit_on(same, dim, nullptr);
    Vec b = Vec::Zero(dim);
    double boost = 0.0;
    if (!other.empty()) {
      b = rng.unit_on(other, dim, nullptr);
      boost = rng.uniform(-2.0, 2.0);
    }
    // <a,a> = level, <b,b> = -level, so cosh/sinh keeps <x,x> = level.
    Vec point = std::cosh(boost) * a + std::sinh(boost) * b;

    // Tangent candidates: the boost partner (causal type opposite to the
    // level), and directions orthogonal to a within `same` (same causal type).
    const bool has_same_type = same.size() >= 2;
    const bool has_other_type = !other.empty();
    const bool want_same = has_same_type && (!has_other_type || i % 2 == 0);
    Vec tangent;
    int tangent_norm;
    if (want_same) {
      tangent = rng.unit_on(same, dim, &a);
      tangent_norm = same_sign;
    } else {
      const Vec partner = std::sinh(boost) * a + std::cosh(boost) * b;
      Vec extra = Vec::Zero(dim);
      if (other.size() >= 2) extra = rng.unit_on(other, dim, &b);
      const double mix = other.size() >= 2 ? rng.uniform(0.0, 2.0 * M_PI) : 0.0;
      // partner and extra are orthogonal and both have norm -level.
      tangent = std::cos(mix) * partner + std::sin(mix) * extra;
      tangent_norm = -same_sign;
    }
    out.push_back({std::move(point), std::move(tangent), tangent_norm});
  }
  return out;
}

}  // namespace cmc
