#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "cmc/profile_ode.hpp"
#include "cmc/pseudo_euclidean.hpp"

namespace cmc {

enum class FamilyId { S1, S2, S3, S4, SCyl1, SCyl2, H1, H2, H3, H4, H5, HCyl1, HCyl2, E1, E2, E3, E4 };

std::string_view to_string(FamilyId id);
/// Case-insensitive: "s1", "SCyl1", "hcyl2", ...
FamilyId parse_family_id(std::string_view name);

/// Which side of sqrt|c| the profile must stay on.
enum class GConstraint { Above, Below, Positive };

/// B2(t), B3(t) on the two frame slots (a, b); B2' = B3 in every case.
enum class FrameKind {
  CoshSinh,  // B2 = (cosh, sinh), B3 = (sinh, cosh)
  SinhCosh,  // B2 = (sinh, cosh), B3 = (cosh, sinh)
  CosSin,    // B2 = (cos, sin),   B3 = (-sin, cos)
  Fixed,     // flat ambient: B2 is a constant axis
};

enum class SlotPattern {
  KAndKPlus1,  // (k, k+1)
  LastTwo,     // (n+1, n+2)
  FirstTwo,    // (1, 2)
  First,       // 1 (flat)
  Last,        // n+1 (flat)
};

enum class RadialFactor { SqrtR2Minus1, SqrtR2Plus1, Sqrt1MinusR2, Height };

/// Static recipe for one immersion: phi = r y + F(r) B2(theta) (or r y + R B2
/// in flat space) and nu = -r lambda y + s2 (r^2 lambda / F) B2 + s3 (r'/F) B3
/// (flat: nu = -r lambda y + s3 r' B2).
struct FamilyDescriptor {
  FamilyId id;
  std::string_view theorem;
  ProfileFamily ode;
  int c_sign;
  GConstraint constraint;
  int k_min;  // k ranges over [k_min, n]
  int base_level;
  SlotPattern slots;
  FrameKind frame;
  RadialFactor radial;
  int ambient_level;  // +1 sphere-type, -1 hyperbolic-type, 0 flat
  int normal_norm;    // <nu, nu>
  int profile_norm;   // <phi_u, phi_u>
  int nu_b2_sign;
  int nu_b3_sign;
  bool cylinder;
  FamilyId parent;  // the non-constant family a cylinder specializes

  bool flat() const noexcept { return ambient_level == 0; }
};

const FamilyDescriptor& descriptor(FamilyId id);
std::span<const FamilyDescriptor> all_descriptors();

/// The energy relation (r')^2 + kappa r^2 lambda^2 = alpha + beta r^2 implied by
/// (g')^2 = q(g) and r = g / sqrt|c|.
struct ScalarIdentity {
  int kappa;
  int alpha;
  int beta;
};
ScalarIdentity scalar_identity(const FamilyDescriptor& d);

/// Frame slots (1-based) for given n, k; flat families use only `first`.
std::pair<int, int> frame_slots(const FamilyDescriptor& d, int n, int k);
AmbientSignature ambient_signature(const FamilyDescriptor& d, int n, int k);
QuadricSpec base_quadric(const FamilyDescriptor& d, int n, int k);

/// lambda = h + g^{-n}, mu = h - (n-1) g^{-n}.
struct PrincipalPair {
  double lambda;
  double mu;
};
PrincipalPair lambda_mu(double g, double h, int n);

/// Mean curvature of the constant-radius cylinder r = r0.
double cylinder_mean_curvature(double r0, int n, FamilyId variant);
/// Every radius r0 realizing mean curvature h (0, 1 or 2 per sign branch).
std::vector<double> solve_cylinder_radius(double h, int n, FamilyId variant);

double radial_factor(RadialFactor f, double r);

class ImmersionInstance {
 public:
  /// Binds an ODE family to a solution of its profile equation. Checks k, the
  /// sign of c and the g-constraint (strict margin 1e-6).
  static ImmersionInstance from_solution(FamilyId id, int k,
                                         std::shared_ptr<const ProfileSolution> solution);
  /// Constant-radius cylinder; u is arc length along the frame circle.
  static ImmersionInstance cylinder(FamilyId id, int n, int k, double r0);

  const FamilyDescriptor& descriptor() const noexcept { return *desc_; }
  int n() const noexcept { return n_; }
  int k() const noexcept { return k_; }
  /// The mean curvature the construction targets.
  double h() const noexcept { return h_ + h_shift_; }
  std::optional<double> c() const noexcept;
  std::optional<double> cylinder_radius() const noexcept { return r0_; }
  const ProfileSolution* solution() const noexcept { return solution_.get(); }
  std::shared_ptr<const ProfileSolution> shared_solution() const noexcept { return solution_; }

  const AmbientSignature& ambient() const noexcept { return ambient_; }
  const QuadricSpec& base() const noexcept { return base_; }
  /// Target quadric for sphere/hyperbolic-type ambients.
  std::optional<QuadricSpec> ambient_quadric() const;
  std::pair<int, int> slots() const noexcept { return slots_; }

  double domain_min() const noexcept;
  double domain_max() const noexcept;
  bool in_domain(double u) const noexcept;
  std::optional<double> period() const noexcept;

  struct Frame {
    double g;
    double r;
    double r_prime;
    double lambda;
    double mu;
    double angle;  // theta(u), or R(u) for flat families
  };
  Frame frame(double u) const;

  /// theta(u) (sphere/hyperbolic families); FamilyMismatch for flat ones.
  double theta(double u) const;
  /// R(u) (flat families); FamilyMismatch otherwise.
  double height(double u) const;
  /// theta (or R) gained over one period; nullopt for non-periodic profiles.
  std::optional<double> angle_advance() const;
  /// Integrand of theta or R at u.
  double angle_rate(double u) const;

  /// phi and nu at (y, u). A nonzero angle_ref evaluates the image under the
  /// frame isometry that moves theta (or R) by -angle_ref; hyperbolic frames
  /// at large theta otherwise carry cosh(theta)-sized cancellations.
  Vec evaluate(const Vec& y, double u, double angle_ref = 0.0) const;
  Vec gauss_map(const Vec& y, double u, double angle_ref = 0.0) const;
  Vec frame_b2(double angle) const;
  Vec frame_b3(double angle) const;

  /// Smallest distance of r from the constraint boundary over the table.
  double constraint_margin() const;

  /// Copy whose theta integrand is scaled and whose lambda, mu are shifted
  /// by h_shift while the profile stays fixed. Used for negative controls.
  ImmersionInstance perturbed(double theta_scale, double h_shift) const;

  /// Sampled (u, r, lambda, mu, theta_or_R) over [u_min, u_max].
  struct Sample {
    double u, r, lambda, mu, angle;
  };
  std::vector<Sample> samples(double u_min, double u_max, int count) const;

 private:
  ImmersionInstance(const FamilyDescriptor& d, int n, int k);
  void build_angle_table();
  double table_angle(double v) const;
  void check_point(const Vec& y, double u) const;

  const FamilyDescriptor* desc_;
  int n_;
  int k_;
  double h_ = 0.0;
  double c_scale_ = 1.0;  // sqrt|c|
  std::optional<double> r0_;
  double cyl_lambda_ = 0.0;
  double cyl_mu_ = 0.0;
  std::shared_ptr<const ProfileSolution> solution_;
  AmbientSignature ambient_;
  QuadricSpec base_;
  std::pair<int, int> slots_;
  double theta_scale_ = 1.0;
  double h_shift_ = 0.0;
  std::vector<double> angle_table_;  // cumulative theta/R at the solution knots
  double angle_origin_ = 0.0;        // table value at u = 0
  double advance_ = 0.0;             // angle over one period
};

}  // namespace cmc
