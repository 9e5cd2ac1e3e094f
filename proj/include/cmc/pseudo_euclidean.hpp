#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace cmc {

using Vec = Eigen::VectorXd;

/// R_k^dim: the first k axes are timelike (negative), the rest spacelike.
class AmbientSignature {
 public:
  AmbientSignature(int dim, int k);

  int dim() const noexcept { return dim_; }
  int k() const noexcept { return k_; }

  /// Sign of <e_i, e_i> for a 1-based slot.
  int axis_sign(int slot) const;

  bool operator==(const AmbientSignature&) const = default;

 private:
  int dim_;
  int k_;
};

/// <v, w> = -sum_{i<=k} v_i w_i + sum_{i>k} v_i w_i.
double inner(const Vec& v, const Vec& w, const AmbientSignature& sig);

/// {x : <x,x> = level} intersected with {x_s = 0 for s in zeroed_slots}.
/// Slots are 1-based throughout the public interface.
class QuadricSpec {
 public:
  QuadricSpec(AmbientSignature signature, int level, std::vector<int> zeroed_slots = {});

  const AmbientSignature& signature() const noexcept { return signature_; }
  int level() const noexcept { return level_; }
  const std::vector<int>& zeroed_slots() const noexcept { return zeroed_; }

  /// Slots not forced to zero, split by causal type.
  const std::vector<int>& free_negative_slots() const noexcept { return free_neg_; }
  const std::vector<int>& free_positive_slots() const noexcept { return free_pos_; }

  /// Dimension of the quadric itself (free slots minus one).
  int manifold_dim() const noexcept {
    return static_cast<int>(free_neg_.size() + free_pos_.size()) - 1;
  }

  /// False when the level set has no real points on the free slots.
  bool non_empty() const noexcept;

 private:
  AmbientSignature signature_;
  int level_;
  std::vector<int> zeroed_;
  std::vector<int> free_neg_;
  std::vector<int> free_pos_;
};

struct QuadricResidual {
  double value;          // <x,x> - level
  double zeroed_slot_max;  // max |x_s| over the zeroed slots
};

QuadricResidual quadric_residual(const Vec& x, const QuadricSpec& q);

struct BaseSample {
  Vec point;
  Vec tangent;
  int tangent_norm;  // <tangent, tangent>, +1 or -1
};

/// Deterministic pseudorandom points on the quadric, each paired with a unit
/// tangent. Causal types alternate when the tangent space admits both.
std::vector<BaseSample> sample_base(const QuadricSpec& q, std::uint64_t seed, int count);

/// Embeds v into a vector of the signature's dimension at the given 1-based slot.
Vec unit_axis(const AmbientSignature& sig, int slot);

}  // namespace cmc
