#pragma once

#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "cmc/ode.hpp"

namespace cmc {

/// The six right-hand sides q(t) of (g')^2 = q(g). With w(t) = h t + t^{1-n}
/// (so w = t*lambda and w' = mu) every family is
///     q(t) = c + s t^2 + sigma w(t)^2
/// for (s, sigma) in {(-1,+1), (-1,-1), (+1,+1), (+1,-1), (0,+1), (0,-1)}.
enum class ProfileFamily { SphereQ, SphereP, HypQ, HypP, EucQ, EucP };

std::string_view to_string(ProfileFamily family);
/// Accepts the CLI spellings sphere-q, sphere-p, hyp-q, hyp-p, euc-q, euc-p.
ProfileFamily parse_profile_family(std::string_view name);

class ProfilePolynomial {
 public:
  ProfilePolynomial(ProfileFamily family, double h, double c, int n);

  ProfileFamily family() const noexcept { return family_; }
  double h() const noexcept { return h_; }
  double c() const noexcept { return c_; }
  int n() const noexcept { return n_; }

  ProfilePolynomial with_c(double c) const { return {family_, h_, c, n_}; }

  struct Value {
    double value;
    double derivative;
  };

  /// q(t) and q'(t), analytically. Throws DomainError for t <= 0.
  Value eval(double t) const;
  double operator()(double t) const { return eval(t).value; }
  double second_derivative(double t) const;

  /// Coefficients (index = power) of t^{2n-2} q(t), a polynomial of degree <= 2n
  /// with the same sign as q on t > 0.
  std::vector<double> cleared_coefficients() const;

  /// Magnitude used to make root and energy tolerances relative.
  double scale() const noexcept;

  int linear_sign() const noexcept { return s_; }
  int square_sign() const noexcept { return sigma_; }

 private:
  ProfileFamily family_;
  double h_;
  double c_;
  int n_;
  int s_;
  int sigma_;
};

struct Root {
  double t;
  bool double_root;
};

/// Upper bound on positive roots from the Cauchy bound of the cleared polynomial.
double default_root_bound(const ProfilePolynomial& q);

/// Sorted positive roots on (0, t_max]. Simple roots are isolated between
/// consecutive critical points (q is monotone there) and refined by bisection
/// to machine precision; a critical point where q vanishes is reported once,
/// flagged double.
std::vector<Root> positive_roots(const ProfilePolynomial& q, std::optional<double> t_max = {});

/// Positive critical points of q where q' changes sign, ascending. Since
/// t^{2n-1} q'(t) / 2 = A x^2 + B x + C with x = t^n, they follow from a quadratic.
std::vector<double> critical_points(const ProfilePolynomial& q);

/// The closed forms v0, v1 for the SphereQ family: v1 exists when h^2 < 1, and
/// at h = -1 the single critical point ((n-1)/(n-2))^{1/n}.
struct SphereCriticalPoints {
  std::optional<double> v0;
  std::optional<double> v1;
};
SphereCriticalPoints sphere_critical_points_closed_form(double h, int n);

/// Value of c at which the SphereQ profile has a double root at v:
/// c = v^2 - v^2 (h + v^{-n})^2.
double sphere_double_root_c(double v, double h, int n);

/// c1: q1(v1) = 0 at c = c1; valid for h in (-1, -2 sqrt(n-1)/n).
double threshold_c1(double h, int n);
/// c0 at h = -1: q1(v0) = c - c0; valid for n >= 3.
double threshold_c0_h_minus_one(int n);
/// c0 for |h| > 1: q1(v0) = c + c0.
double threshold_c0_outer(double h, int n);
/// (v1 / sqrt(c1))^2 in closed form, h in (-1, -2 sqrt(n-1)/n).
double v1_over_sqrt_c1_squared(double h, int n);

struct Thresholds {
  std::optional<double> c1;
  std::optional<double> c0_h_minus_one;
  std::optional<double> c0_outer;
};

/// Every constant defined at (h, n); throws OutOfRange when none is.
Thresholds thresholds(double h, int n);

// ---------------------------------------------------------------------------
// Solutions

struct ProfileSample {
  double u;
  double g;
  double g_prime;
};

struct ProfileState {
  double g;
  double g_prime;
};

struct PeriodicKind {
  double t1;
  double t2;
  double period;      // singular quadrature of 2 F(t2)
  double period_ode;  // twice the first turning point of g'' = q'(g)/2
};

struct UnboundedKind {
  double a;
  double asymptotic_coeff;  // lim q(t)/t^2; zero in the linear-growth case
  bool linear_growth;       // q(t) -> const > 0 instead of ~ eps t^2
  double u_max;             // half-width of the tabulated even domain
};

struct ConstantKind {
  double t0;
};

/// A non-constant solution on a finite interval, started inside the
/// positivity region with g'(0) = +sqrt(q(g0)).
struct LocalKind {
  double g0;
  double u_min;
  double u_max;
};

using SolutionKind = std::variant<PeriodicKind, UnboundedKind, ConstantKind, LocalKind>;

struct SolveOptions {
  double knot_spacing = 1.0 / 128.0;
  ode::Tolerance tolerance{};
  double energy_tolerance = 1e-8;
  double period_agreement = 1e-8;
};

/// A solution tabulated on its fundamental domain (half period, half line or
/// local interval) with quintic Hermite interpolation between knots, using
/// g'' = q'(g)/2 at each knot. Periodic solutions extend by even reflection
/// and translation, unbounded ones by even reflection.
class ProfileSolution {
 public:
  ProfileSolution(ProfilePolynomial profile, SolutionKind kind, std::vector<ProfileSample> knots);

  const ProfilePolynomial& profile() const noexcept { return profile_; }
  const SolutionKind& kind() const noexcept { return kind_; }
  const std::vector<ProfileSample>& samples() const noexcept { return knots_; }

  bool periodic() const noexcept { return std::holds_alternative<PeriodicKind>(kind_); }
  bool constant() const noexcept { return std::holds_alternative<ConstantKind>(kind_); }

  /// Where a parameter u lands in the table: table coordinate v, whether g'
  /// flips sign (reflected branch), and the number of whole periods.
  struct Fold {
    double v;
    bool mirrored;
    long period_index;
  };
  Fold fold(double u) const;

  ProfileState state(double u) const;
  ProfileState table_state(double v) const;

  double domain_min() const noexcept;
  double domain_max() const noexcept;
  bool in_domain(double u) const noexcept;

  double table_begin() const noexcept { return knots_.front().u; }
  double table_end() const noexcept { return knots_.back().u; }

  double min_g() const noexcept;
  double max_g() const noexcept;

  /// max of |(g')^2 - q(g)| / max(1, (g')^2, |q(g)|) over the knots and the
  /// interpolated midpoints between them.
  double energy_residual_max() const;
  double energy_residual(const ProfileSample& s) const;

 private:
  ProfilePolynomial profile_;
  SolutionKind kind_;
  std::vector<ProfileSample> knots_;
  double spacing_;
};

/// Period by the singular quadrature T = 2 int_{t1}^{t2} dtau / sqrt(q(tau)),
/// with tau = t1 + s^2 and tau = t2 - s^2 removing the endpoint singularities.
double period_by_quadrature(const ProfilePolynomial& q, double t1, double t2);

/// Period as twice the first turning point of g'' = q'(g)/2 from (t1, 0).
double period_by_turning_point(const ProfilePolynomial& q, double t1, ode::Tolerance tol = {});

/// Periodic solution with g(0) = t1, g'(0) = 0 on a validated simple-root
/// bracket. Throws InvalidBracket, or DoubleRootError when an endpoint is a
/// double root.
ProfileSolution solve_periodic(const ProfilePolynomial& q, double t1, double t2,
                               const SolveOptions& options = {});

/// Even solution with g(0) = a increasing on u > 0, tabulated until g reaches
/// t_horizon. Throws BadRoot or NotCoercive.
ProfileSolution solve_unbounded(const ProfilePolynomial& q, double a, double t_horizon,
                                const SolveOptions& options = {});

ProfileSolution constant_solution(const ProfilePolynomial& q, double t0);

/// Local solution through g0, kept strictly inside (g_lo, g_hi) and |u| <= u_span.
ProfileSolution solve_local(const ProfilePolynomial& q, double g0, double g_lo, double g_hi,
                            double u_span, const SolveOptions& options = {});

}  // namespace cmc
