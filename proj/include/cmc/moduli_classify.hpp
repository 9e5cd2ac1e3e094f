#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cmc/immersion_families.hpp"

namespace cmc {

enum class SolutionClass { Periodic, Unbounded, Constant, None };
std::string_view to_string(SolutionClass c);

struct ClassificationRecord {
  FamilyId family = FamilyId::S1;
  int n = 0;
  int k = 0;
  double h = 0.0;
  double c = 0.0;
  SolutionClass solution_class = SolutionClass::None;
  std::optional<double> t1;  // periodic bracket
  std::optional<double> t2;
  std::optional<double> root;  // unbounded: minimum a; constant: double root; cylinder: r0
  std::optional<double> period;
  std::optional<double> theta_advance;
  bool closed_flag = false;
  bool spacelike_complete_flag = false;
  bool linear_growth = false;
  double constraint_margin = 0.0;  // of the chosen bracket/root in units of r
  std::string theorem_tag;
  std::string note;
};

/// Classification of a bare profile polynomial, without any g-constraint.
struct ProfileClass {
  SolutionClass solution_class = SolutionClass::None;
  std::optional<double> t1;
  std::optional<double> t2;
  std::optional<double> root;
  bool linear_growth = false;
};
ProfileClass classify_profile(const ProfilePolynomial& q);

/// `auto` value of c for a profile family at (h, n): c1, c0 or -c0 for
/// SphereQ (via thresholds), otherwise the double-root value at the largest
/// critical point. Throws OutOfRange when no critical point exists.
double auto_c(ProfileFamily family, double h, int n);

struct ClassifyOptions {
  bool compute_theta = true;  // builds the instance for periodic records
  SolveOptions solve{};
};

/// Decides the solution class of the profile attached to `family` at (n, k, h, c).
/// Cylinder families ignore c and report the constant radius solving h.
/// Throws OutOfValidity outside k in [k_min, n], n >= 2 or the family's sign of c.
ClassificationRecord classify(FamilyId family, int n, int k, double h, double c,
                              const ClassifyOptions& options = {});

struct InstanceOptions {
  bool allow_local = true;  // fall back to a local arc when no global solution fits
  double local_span = 1.0;
  double horizon_factor = 50.0;  // unbounded tables run to g = factor * max(1, a)
  SolveOptions solve{};
};

/// Builds the immersion for an ODE family: a periodic, unbounded or constant
/// solution when classify finds one inside the g-constraint, otherwise (if
/// allowed) a local solution arc through the middle of an admissible interval.
ImmersionInstance make_instance(FamilyId family, int n, int k, double h, double c,
                                const InstanceOptions& options = {});
/// Cylinder families: r0 from solve_cylinder_radius (the smallest valid root).
ImmersionInstance make_cylinder(FamilyId family, int n, int k, double h);

struct Interval {
  double lo;
  double hi;
  bool lo_closed = false;
  bool hi_closed = false;
  bool empty() const { return !(lo < hi) && !(lo == hi && lo_closed && hi_closed); }
  bool contains(double x) const {
    return (lo_closed ? x >= lo : x > lo) && (hi_closed ? x <= hi : x < hi);
  }
};

struct DesitterRange {
  Interval range;           // [-1, -2 sqrt(n-1)/n)
  std::string lower_note;   // construction used at h = -1
  std::string interior_note;
};
/// Throws OutOfValidity for n < 3.
DesitterRange realizable_range_closed_desitter(int n);

/// c-window (c1, c1 + eps) with closed periodic S1 profiles, located by the
/// expanding search c1 (1 + 2^-j), j = 40..1, and bisection of the boundary.
struct CWindow {
  double c_lo;
  double c_hi;
  int probes;  // classify calls spent
};
CWindow desitter_c_window(double h, int n);

/// A closed de Sitter instance for h in [-1, -2 sqrt(n-1)/n): the middle of the
/// c-window, or at h = -1 an unbounded profile with c slightly below c0.
ImmersionInstance closed_desitter_instance(double h, int n, int k = 1);

/// Open interval between cot(pi/m) and (m^2-2) sqrt(n-1) / (n sqrt(m^2-1)).
Interval embedded_window(int n, int m);

/// Smallest c with a periodic S4 profile (the double-root value).
double s4_double_root_c(double h, int n);
/// Theta advance per period of the S4 family at (n, h, c).
double s4_theta_advance(int n, double h, double c);

struct AngleMatch {
  double c;
  double theta_advance;
  int iterations;
};
/// Bisection on c -> Theta(c) - 2 pi / m over c_bracket. NoSignChange when the
/// endpoints do not straddle the target. Without a bracket the first sign
/// change on a geometric c-grid above the double-root value is used.
AngleMatch match_angle(int n, double h, int m, std::optional<std::pair<double, double>> c_bracket = {});

/// max |phi(y, u + T) - R phi(y, u)| over sampled (y, u), R the rotation by
/// the theta advance in the frame plane; and max |phi(y, u + m T) - phi(y, u)|.
struct ClosureResidual {
  double rotation;
  double full_turn;
};
ClosureResidual closure_residual(const ImmersionInstance& inst, int m, int base_samples = 4,
                                 int u_samples = 16);

struct CylinderRange {
  Interval range;  // for r0 > 0
  double numeric_min;
  double argmin_r0;
};
/// Closed-form range of cylinder_mean_curvature over positive radii, cross-
/// checked by golden-section minimization.
CylinderRange hyperbolic_cylinder_range(int n, FamilyId variant);

/// Golden-section minimization of f on [a, b].
struct Minimum {
  double x;
  double value;
};
Minimum golden_section(const std::function<double(double)>& f, double a, double b, double tol = 1e-12);

struct RangeReport {
  FamilyId family;
  Interval range;
  std::string statement;
};
/// Mean-curvature ranges with embedded examples in the hyperbolic-type ambients.
std::vector<RangeReport> hyperbolic_embedding_reports(int n);

struct SweepPoint {
  FamilyId family;
  int n;
  int k;
  double h;
  double c;
};
/// Classifies every point in parallel; the result keeps the input order.
/// Points that fail validity yield a None record carrying the error text.
std::vector<ClassificationRecord> sweep(const std::vector<SweepPoint>& points, unsigned threads = 0,
                                        const ClassifyOptions& options = {});

}  // namespace cmc
