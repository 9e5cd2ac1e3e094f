#include "cmc/profile_ode.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "cmc/error.hpp"
#include "cmc/quadrature.hpp"

namespace cmc {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Signs {
  int s;
  int sigma;
};

Signs signs_of(ProfileFamily f) {
  switch (f) {
    case ProfileFamily::SphereQ: return {-1, 1};
    case ProfileFamily::SphereP: return {-1, -1};
    case ProfileFamily::HypQ: return {1, 1};
    case ProfileFamily::HypP: return {1, -1};
    case ProfileFamily::EucQ: return {0, 1};
    case ProfileFamily::EucP: return {0, -1};
  }
  return {0, 1};
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double f_lo) {
  for (int i = 0; i < 200 && hi - lo > 2 * kEps * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid < 0) == (f_lo < 0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

bool double_root_flag(const ProfilePolynomial& q, double t) {
  return std::abs(q.eval(t).derivative) < 1e-9 * std::max(1.0, std::abs(q.second_derivative(t)));
}

}  // namespace

std::string_view to_string(ProfileFamily family) {
  switch (family) {
    case ProfileFamily::SphereQ: return "sphere-q";
    case ProfileFamily::SphereP: return "sphere-p";
    case ProfileFamily::HypQ: return "hyp-q";
    case ProfileFamily::HypP: return "hyp-p";
    case ProfileFamily::EucQ: return "euc-q";
    case ProfileFamily::EucP: return "euc-p";
  }
  return "?";
}

ProfileFamily parse_profile_family(std::string_view name) {
  for (auto f : {ProfileFamily::SphereQ, ProfileFamily::SphereP, ProfileFamily::HypQ,
                 ProfileFamily::HypP, ProfileFamily::EucQ, ProfileFamily::EucP}) {
    if (to_string(f) == name) return f;
  }
  throw Error(ErrorKind::ContractViolation, "unknown profile family '" + std::string(name) + "'");
}

ProfilePolynomial::ProfilePolynomial(ProfileFamily family, double h, double c, int n)
    : family_(family), h_(h), c_(c), n_(n) {
  if (n < 2) throw Error(ErrorKind::DomainError, "profile requires n >= 2");
  if (!std::isfinite(h) || !std::isfinite(c)) {
    throw Error(ErrorKind::DomainError, "profile parameters must be finite");
  }
  if ((family == ProfileFamily::EucQ || family == ProfileFamily::EucP) && c == 0.0) {
    throw Error(ErrorKind::DomainError, "Euclidean profiles require c != 0");
  }
  const Signs sg = signs_of(family);
  s_ = sg.s;
  sigma_ = sg.sigma;
}

ProfilePolynomial::Value ProfilePolynomial::eval(double t) const {
  if (!(t > 0)) throw Error(ErrorKind::DomainError, "profile evaluated at t <= 0");
  const double t_neg_n = std::pow(t, -n_);
  const double w = t * (h_ + t_neg_n);           // t * lambda
  const double w_prime = h_ - (n_ - 1) * t_neg_n;  // mu
  return {c_ + s_ * t * t + sigma_ * w * w, 2.0 * s_ * t + 2.0 * sigma_ * w * w_prime};
}

double ProfilePolynomial::second_derivative(double t) const {
  if (!(t > 0)) throw Error(ErrorKind::DomainError, "profile evaluated at t <= 0");
  const double t_neg_n = std::pow(t, -n_);
  const double w = t * (h_ + t_neg_n);
  const double w1 = h_ - (n_ - 1) * t_neg_n;
  const double w2 = n_ * (n_ - 1) * t_neg_n / t;
  return 2.0 * s_ + 2.0 * sigma_ * (w1 * w1 + w * w2);
}

std::vector<double> ProfilePolynomial::cleared_coefficients() const {
  // t^{2n-2} q = (s + sigma h^2) t^{2n} + c t^{2n-2} + 2 sigma h t^n + sigma
  std::vector<double> a(static_cast<std::size_t>(2 * n_ + 1), 0.0);
  a[2 * n_] += s_ + sigma_ * h_ * h_;
  a[2 * n_ - 2] += c_;
  a[n_] += 2.0 * sigma_ * h_;
  a[0] += sigma_;
  return a;
}

double ProfilePolynomial::scale() const noexcept {
  return std::max({1.0, std::abs(c_), h_ * h_});
}

double default_root_bound(const ProfilePolynomial& q) {
  const auto a = q.cleared_coefficients();
  std::size_t deg = a.size() - 1;
  while (deg > 0 && a[deg] == 0.0) --deg;
  if (deg == 0) return 1.0;
  double m = 0.0;
  for (std::size_t i = 0; i < deg; ++i) m = std::max(m, std::abs(a[i] / a[deg]));
  return 1.0 + m;
}

namespace {

double root_lower_bound(const ProfilePolynomial& q) {
  const auto a = q.cleared_coefficients();
  double m = 0.0;
  for (std::size_t i = 1; i < a.size(); ++i) m = std::max(m, std::abs(a[i] / a[0]));
  return 1.0 / (1.0 + m);
}

}  // namespace

std::vector<double> critical_points(const ProfilePolynomial& q) {
  const double h = q.h();
  const int n = q.n();
  const int s = q.linear_sign();
  const int sigma = q.square_sign();
  const double A = s + sigma * h * h;
  const double B = sigma * h * (2 - n);
  const double C = sigma * (1 - n);
  std::vector<double> xs;
  if (A == 0.0) {
    if (B != 0.0) xs.push_back(-C / B);
  } else {
    const double disc = B * B - 4 * A * C;
    if (disc > 0) {
      const double qq = -0.5 * (B + (B >= 0 ? 1.0 : -1.0) * std::sqrt(disc));
      xs.push_back(qq / A);
      if (qq != 0.0) xs.push_back(C / qq);
    }
  }
  std::vector<double> out;
  for (double x : xs) {
    if (x > 0 && std::isfinite(x)) out.push_back(std::pow(x, 1.0 / n));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Root> positive_roots(const ProfilePolynomial& q, std::optional<double> t_max) {
  const double hi_bound = t_max.value_or(default_root_bound(q));
  const double lo_bound = 0.5 * root_lower_bound(q);
  std::vector<Root> roots;
  if (!(hi_bound > lo_bound)) return roots;

  const auto crit = critical_points(q);
  std::vector<double> nodes;
  constexpr int kGrid = 256;
  const double ratio = std::log(hi_bound / lo_bound);
  for (int i = 0; i <= kGrid; ++i) nodes.push_back(lo_bound * std::exp(ratio * i / kGrid));
  nodes.back() = hi_bound;
  for (double v : crit) {
    if (v > lo_bound && v < hi_bound) nodes.push_back(v);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  const double zero_tol = 1e-12 * q.scale();
  std::vector<double> values(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    values[i] = q(nodes[i]);
    if (std::find(crit.begin(), crit.end(), nodes[i]) != crit.end() &&
        std::abs(values[i]) <= zero_tol) {
      values[i] = 0.0;
      roots.push_back({nodes[i], true});
    }
  }
  const auto f = [&q](double t) { return q(t); };
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    if ((values[i] < 0 && values[i + 1] > 0) || (values[i] > 0 && values[i + 1] < 0)) {
      const double r = bisect(f, nodes[i], nodes[i + 1], values[i]);
      roots.push_back({r, double_root_flag(q, r)});
    }
  }
  std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) { return a.t < b.t; });
  return roots;
}

SphereCriticalPoints sphere_critical_points_closed_form(double h, int n) {
  SphereCriticalPoints out;
  if (h == -1.0) {
    if (n >= 3) out.v0 = std::pow(double(n - 1) / (n - 2), 1.0 / n);
    return out;
  }
  if (h * h == 1.0) return out;
  const double disc = 4.0 - 4.0 * n + h * h * n * n;
  if (disc < 0) return out;
  const double root = std::sqrt(disc);
  const double scale = std::pow(2.0, -1.0 / n);
  const double base0 = (h * (n - 2) + root) / (h * h - 1);
  const double base1 = (h * (n - 2) - root) / (h * h - 1);
  if (base0 > 0) out.v0 = scale * std::pow(base0, 1.0 / n);
  if (h * h < 1 && base1 > 0) out.v1 = scale * std::pow(base1, 1.0 / n);
  return out;
}

double sphere_double_root_c(double v, double h, int n) {
  const double lambda = h + std::pow(v, -n);
  return v * v * (1.0 - lambda * lambda);
}

namespace {

void require_c1_window(double h, int n) {
  if (n < 2 || !(h > -1.0 && h < -2.0 * std::sqrt(n - 1.0) / n)) {
    throw Error(ErrorKind::OutOfRange,
                "c1 is defined for h in (-1, -2 sqrt(n-1)/n); got h=" + std::to_string(h));
  }
}

}  // namespace

double threshold_c1(double h, int n) {
  require_c1_window(h, n);
  const double root = std::sqrt(4.0 - 4.0 * n + h * h * n * n);
  return std::pow(2.0 - 2.0 * h * h, (n - 2.0) / n) * n *
         std::pow(-h * (n - 2) + root, (2.0 - 2.0 * n) / n) * (h * h * n - 2.0 - h * root);
}

double threshold_c0_h_minus_one(int n) {
  if (n < 3) throw Error(ErrorKind::OutOfRange, "c0 at h = -1 requires n >= 3");
  return n * std::pow(n - 2.0, (n - 2.0) / n) * std::pow(n - 1.0, (2.0 - 2.0 * n) / n);
}

double threshold_c0_outer(double h, int n) {
  if (n < 2 || !(std::abs(h) > 1.0)) {
    throw Error(ErrorKind::OutOfRange, "outer c0 requires |h| > 1");
  }
  const double root = std::sqrt(4.0 - 4.0 * n + h * h * n * n);
  return std::pow(2.0 * h * h - 2.0, (n - 2.0) / n) * n *
         std::pow(h * (n - 2) + root, (2.0 - 2.0 * n) / n) * (h * h * n - 2.0 + h * root);
}

double v1_over_sqrt_c1_squared(double h, int n) {
  require_c1_window(h, n);
  return (2.0 + (-2.0 + h * h) * n + h * std::sqrt(4.0 + n * (-4.0 + h * h * n))) /
         (2.0 * (-1.0 + h * h) * n);
}

Thresholds thresholds(double h, int n) {
  Thresholds t;
  if (n >= 2 && h > -1.0 && h < -2.0 * std::sqrt(n - 1.0) / n) t.c1 = threshold_c1(h, n);
  if (h == -1.0 && n >= 3) t.c0_h_minus_one = threshold_c0_h_minus_one(n);
  if (n >= 2 && std::abs(h) > 1.0) t.c0_outer = threshold_c0_outer(h, n);
  if (!t.c1 && !t.c0_h_minus_one && !t.c0_outer) {
    throw Error(ErrorKind::OutOfRange, "no threshold constant is defined at h=" + std::to_string(h) +
                                           ", n=" + std::to_string(n));
  }
  return t;
}

// ---------------------------------------------------------------------------
// ProfileSolution

ProfileSolution::ProfileSolution(ProfilePolynomial profile, SolutionKind kind,
                                 std::vector<ProfileSample> knots)
    : profile_(std::move(profile)), kind_(std::move(kind)), knots_(std::move(knots)) {
  if (knots_.size() < 2) throw Error(ErrorKind::ContractViolation, "solution table needs >= 2 knots");
  spacing_ = knots_[1].u - knots_[0].u;
}

ProfileSolution::Fold ProfileSolution::fold(double u) const {
  if (!std::isfinite(u)) throw Error(ErrorKind::DomainExceeded, "non-finite parameter");
  if (const auto* p = std::get_if<PeriodicKind>(&kind_)) {
    const double period = p->period;
    const double half = knots_.back().u;
    const double k = std::floor(u / period);
    double w = u - k * period;
    if (w < 0) w = 0;
    if (w > half) return {std::clamp(period - w, 0.0, half), true, static_cast<long>(k)};
    return {w, false, static_cast<long>(k)};
  }
  if (std::holds_alternative<ConstantKind>(kind_)) return {u, false, 0};
  if (const auto* b = std::get_if<UnboundedKind>(&kind_)) {
    const double v = std::abs(u);
    if (v > b->u_max * (1 + 1e-12)) {
      throw Error(ErrorKind::DomainExceeded,
                  "u=" + std::to_string(u) + " beyond tabulated half-width " + std::to_string(b->u_max));
    }
    return {std::min(v, b->u_max), u < 0, 0};
  }
  const auto& l = std::get<LocalKind>(kind_);
  if (u < l.u_min - 1e-12 || u > l.u_max + 1e-12) {
    throw Error(ErrorKind::DomainExceeded, "u=" + std::to_string(u) + " outside local domain");
  }
  return {std::clamp(u, l.u_min, l.u_max), false, 0};
}

ProfileState ProfileSolution::table_state(double v) const {
  if (const auto* k = std::get_if<ConstantKind>(&kind_)) return {k->t0, 0.0};
  const double u0 = knots_.front().u;
  const auto last = static_cast<long>(knots_.size()) - 2;
  const long j = std::clamp(static_cast<long>(std::floor((v - u0) / spacing_)), 0L, last);
  const ProfileSample& a = knots_[static_cast<std::size_t>(j)];
  const ProfileSample& b = knots_[static_cast<std::size_t>(j + 1)];
  const double dx = b.u - a.u;
  const double t = (v - a.u) / dx;
  const double a2 = 0.5 * profile_.eval(a.g).derivative;
  const double b2 = 0.5 * profile_.eval(b.g).derivative;
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;

  const double h0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
  const double h1 = t - 6 * t3 + 8 * t4 - 3 * t5;
  const double h2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
  const double h3 = 10 * t3 - 15 * t4 + 6 * t5;
  const double h4 = -4 * t3 + 7 * t4 - 3 * t5;
  const double h5 = 0.5 * (t3 - 2 * t4 + t5);

  const double d0 = -30 * t2 + 60 * t3 - 30 * t4;
  const double d1 = 1 - 18 * t2 + 32 * t3 - 15 * t4;
  const double d2 = 0.5 * (2 * t - 9 * t2 + 12 * t3 - 5 * t4);
  const double d3 = 30 * t2 - 60 * t3 + 30 * t4;
  const double d4 = -12 * t2 + 28 * t3 - 15 * t4;
  const double d5 = 0.5 * (3 * t2 - 8 * t3 + 5 * t4);

  const double g = a.g * h0 + dx * a.g_prime * h1 + dx * dx * a2 * h2 + b.g * h3 +
                   dx * b.g_prime * h4 + dx * dx * b2 * h5;
  const double gp = (a.g * d0 + b.g * d3) / dx + a.g_prime * d1 + b.g_prime * d4 +
                    dx * (a2 * d2 + b2 * d5);
  return {g, gp};
}

ProfileState ProfileSolution::state(double u) const {
  const Fold f = fold(u);
  ProfileState s = table_state(f.v);
  if (f.mirrored) s.g_prime = -s.g_prime;
  return s;
}

double ProfileSolution::domain_min() const noexcept {
  if (const auto* b = std::get_if<UnboundedKind>(&kind_)) return -b->u_max;
  if (const auto* l = std::get_if<LocalKind>(&kind_)) return l->u_min;
  return -std::numeric_limits<double>::infinity();
}

double ProfileSolution::domain_max() const noexcept {
  if (const auto* b = std::get_if<UnboundedKind>(&kind_)) return b->u_max;
  if (const auto* l = std::get_if<LocalKind>(&kind_)) return l->u_max;
  return std::numeric_limits<double>::infinity();
}

bool ProfileSolution::in_domain(double u) const noexcept {
  return u >= domain_min() && u <= domain_max();
}

double ProfileSolution::min_g() const noexcept {
  double m = knots_.front().g;
  for (const auto& k : knots_) m = std::min(m, k.g);
  return m;
}

double ProfileSolution::max_g() const noexcept {
  double m = knots_.front().g;
  for (const auto& k : knots_) m = std::max(m, k.g);
  return m;
}

double ProfileSolution::energy_residual(const ProfileSample& s) const {
  const double q = profile_(s.g);
  const double gp2 = s.g_prime * s.g_prime;
  return std::abs(gp2 - q) / std::max({1.0, gp2, std::abs(q)});
}

double ProfileSolution::energy_residual_max() const {
  double m = 0.0;
  for (const auto& k : knots_) m = std::max(m, energy_residual(k));
  if (constant()) return m;
  // the interpolant is least accurate halfway between knots
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    const double v = 0.5 * (knots_[i - 1].u + knots_[i].u);
    const ProfileState st = table_state(v);
    m = std::max(m, energy_residual({v, st.g, st.g_prime}));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Construction

namespace {

using State2 = ode::State<2>;

// Tables are refined by halving the knot spacing until the interpolated
// energy residual sits comfortably below the tolerance.
constexpr double kRefineFraction = 0.1;
constexpr int kMaxRefinements = 5;
constexpr long kMaxKnots = 400'000;

auto second_order_rhs(const ProfilePolynomial& q) {
  return [&q](double, const State2& y) -> State2 { return {y[1], 0.5 * q.eval(y[0]).derivative}; };
}

void validate_bracket(const ProfilePolynomial& q, double t1, double t2) {
  if (!(t1 > 0 && t2 > t1)) throw Error(ErrorKind::InvalidBracket, "bracket must satisfy 0 < t1 < t2");
  const double tol = 1e-9 * q.scale();
  const auto v1 = q.eval(t1);
  const auto v2 = q.eval(t2);
  if (std::abs(v1.value) > tol || std::abs(v2.value) > tol) {
    throw Error(ErrorKind::InvalidBracket, "bracket endpoints are not roots of q");
  }
  if (double_root_flag(q, t1)) throw DoubleRootError(t1, "lower bracket endpoint is a double root");
  if (double_root_flag(q, t2)) throw DoubleRootError(t2, "upper bracket endpoint is a double root");
  if (!(v1.derivative > 0 && v2.derivative < 0)) {
    throw Error(ErrorKind::InvalidBracket, "need q'(t1) > 0 and q'(t2) < 0");
  }
  for (const Root& r : positive_roots(q)) {
    if (r.t > t1 * (1 + 1e-12) && r.t < t2 * (1 - 1e-12)) {
      throw Error(ErrorKind::InvalidBracket, "q vanishes inside the bracket");
    }
  }
  if (!(q(0.5 * (t1 + t2)) > 0)) throw Error(ErrorKind::InvalidBracket, "q is not positive inside");
}

/// Knot-by-knot tabulation of g'' = q'(g)/2 from (u0, y0) in steps of
/// `spacing` (signed). `keep_going` sees each new knot and returns false to
/// stop before it is stored.
template <class Pred>
std::vector<ProfileSample> tabulate(const ProfilePolynomial& q, State2 y, double spacing,
                                    long max_knots, const ode::Tolerance& tol, Pred keep_going) {
  std::vector<ProfileSample> out;
  out.push_back({0.0, y[0], y[1]});
  const auto rhs = second_order_rhs(q);
  double dt = std::abs(spacing) * 0.25;
  for (long j = 1; j <= max_knots; ++j) {
    State2 next;
    try {
      next = ode::integrate<2>(rhs, (j - 1) * spacing, y, j * spacing, dt, tol);
    } catch (const Error&) {
      break;  // left the domain t > 0
    }
    const ProfileSample s{j * spacing, next[0], next[1]};
    if (!keep_going(s)) break;
    out.push_back(s);
    y = next;
  }
  return out;
}

}  // namespace

double period_by_quadrature(const ProfilePolynomial& q, double t1, double t2) {
  const double mid = 0.5 * (t1 + t2);
  // q near a root r is evaluated as q(r + d) - q(r), or by its second-order
  // Taylor polynomial when d is below the rounding floor of q itself.
  const auto make = [&q](double root, double sign) {
    const auto at = q.eval(root);
    const double q2 = q.second_derivative(root);
    const double taylor_below = 1e-5 * std::max(1.0, root);
    return [&q, root, sign, at, q2, taylor_below](double s) {
      const double d = s * s;
      double value = d < taylor_below ? sign * at.derivative * d + 0.5 * q2 * d * d
                                      : q(root + sign * d) - at.value;
      return 2.0 * s / std::sqrt(std::max(value, std::numeric_limits<double>::min()));
    };
  };
  const auto a = quadrature::integrate(make(t1, 1.0), 0.0, std::sqrt(mid - t1), 1e-13, 1e-14);
  const auto b = quadrature::integrate(make(t2, -1.0), 0.0, std::sqrt(t2 - mid), 1e-13, 1e-14);
  return 2.0 * (a.value + b.value);
}

double period_by_turning_point(const ProfilePolynomial& q, double t1, ode::Tolerance tol) {
  const auto rhs = second_order_rhs(q);
  State2 y{t1, 0.0};
  double t = 0.0;
  double h = 1e-3;
  bool rising = false;
  for (int step = 0; step < 10'000'000; ++step) {
    const auto r = ode::dopri_step<2>(rhs, t, y, h, tol);
    if (!std::isfinite(r.error) || r.error > 1.0) {
      h *= std::isfinite(r.error) ? std::clamp(0.9 * std::pow(r.error, -0.2), 0.2, 1.0) : 0.25;
      continue;
    }
    if (rising && r.y[1] <= 0.0) {
      // g' crossed zero inside this step; solve for the sub-step that lands on it.
      double lo = 0.0, hi = h;
      for (int i = 0; i < 200 && hi - lo > 4 * kEps * (t + hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        if (ode::dopri_step<2>(rhs, t, y, mid, tol).y[1] > 0.0) lo = mid;
        else hi = mid;
      }
      return 2.0 * (t + 0.5 * (lo + hi));
    }
    if (r.y[1] > 0.0) rising = true;
    t += h;
    y = r.y;
    h *= r.error == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(r.error, -0.2), 0.2, 5.0);
  }
  throw Error(ErrorKind::IntegrationFailure, "no turning point found");
}

ProfileSolution solve_periodic(const ProfilePolynomial& q, double t1, double t2,
                               const SolveOptions& options) {
  validate_bracket(q, t1, t2);
  const double period = period_by_quadrature(q, t1, t2);
  const double period_ode = period_by_turning_point(q, t1, options.tolerance);
  if (std::abs(period - period_ode) > options.period_agreement * period) {
    throw Error(ErrorKind::IntegrationFailure,
                "period methods disagree: quadrature " + std::to_string(period) + " vs ODE " +
                    std::to_string(period_ode));
  }
  const double half = 0.5 * period;
  long count = std::max(8L, static_cast<long>(std::ceil(half / options.knot_spacing)));
  for (int refine = 0;; ++refine, count *= 2) {
    const double spacing = half / count;
    auto knots = tabulate(q, {t1, 0.0}, spacing, count, options.tolerance,
                          [](const ProfileSample&) { return true; });
    if (static_cast<long>(knots.size()) != count + 1) {
      throw Error(ErrorKind::IntegrationFailure, "periodic tabulation stopped early");
    }
    // The half-period knot is the turning point t2; pin it so the mirrored
    // branch joins smoothly.
    ProfileSample& end = knots.back();
    if (std::abs(end.g - t2) > 1e-8 * std::max(1.0, t2)) {
      throw Error(ErrorKind::IntegrationFailure, "g(T/2) misses t2 by " + std::to_string(end.g - t2));
    }
    end.u = half;
    end.g = t2;
    end.g_prime = 0.0;
    ProfileSolution sol(q, PeriodicKind{t1, t2, period, period_ode}, std::move(knots));
    const double e = sol.energy_residual_max();
    if (e <= kRefineFraction * options.energy_tolerance) return sol;
    if (refine == kMaxRefinements || count > kMaxKnots / 2) {
      if (e <= options.energy_tolerance) return sol;
      throw Error(ErrorKind::IntegrationFailure, "energy residual above tolerance");
    }
  }
}

ProfileSolution solve_unbounded(const ProfilePolynomial& q, double a, double t_horizon,
                                const SolveOptions& options) {
  if (!(a > 0)) throw Error(ErrorKind::BadRoot, "root must be positive");
  const auto at_a = q.eval(a);
  if (std::abs(at_a.value) > 1e-9 * q.scale() || !(at_a.derivative > 0)) {
    throw Error(ErrorKind::BadRoot, "need q(a) = 0 and q'(a) > 0");
  }
  if (double_root_flag(q, a)) throw DoubleRootError(a, "starting root is a double root");
  if (!(t_horizon > a)) throw Error(ErrorKind::BadRoot, "horizon must exceed the root");
  for (const Root& r : positive_roots(q)) {
    if (r.t > a * (1 + 1e-12)) {
      throw Error(ErrorKind::NotCoercive, "q vanishes again at t=" + std::to_string(r.t));
    }
  }
  // lim q/t^2 = eps > 0, or q -> const > 0 (linear growth of g).
  double eps = 0.0;
  bool linear = false;
  bool certified = false;
  double t_e = std::max(t_horizon, 2 * a);
  for (int i = 0; i < 60 && !certified; ++i, t_e *= 2) {
    const double q1 = q(t_e), q2 = q(2 * t_e);
    const double e1 = q1 / (t_e * t_e), e2 = q2 / (4 * t_e * t_e);
    if (e2 > 0 && std::abs(e2 - e1) < 1e-3 * e2 && e2 > 1e-12 * q.scale()) {
      eps = e2;
      certified = true;
    } else if (q2 > 0 && std::abs(q2 - q1) < 1e-3 * q2 && e2 < 1e-6) {
      linear = true;
      certified = true;
    }
  }
  if (!certified) throw Error(ErrorKind::NotCoercive, "q(t)/t^2 has no positive limit");

  double spacing = options.knot_spacing;
  for (int refine = 0;; ++refine, spacing *= 0.5) {
    auto knots = tabulate(q, {a, 0.0}, spacing, kMaxKnots, options.tolerance,
                          [reached = false, t_horizon](const ProfileSample& s) mutable {
                            if (reached) return false;
                            reached = s.g >= t_horizon;
                            return true;
                          });
    if (knots.size() < 2) throw Error(ErrorKind::IntegrationFailure, "unbounded tabulation failed");
    const double u_max = knots.back().u;
    ProfileSolution sol(q, UnboundedKind{a, eps, linear, u_max}, std::move(knots));
    const double e = sol.energy_residual_max();
    if (e <= kRefineFraction * options.energy_tolerance) return sol;
    if (refine == kMaxRefinements) {
      if (e <= options.energy_tolerance) return sol;
      throw Error(ErrorKind::IntegrationFailure, "energy residual above tolerance");
    }
  }
}

ProfileSolution constant_solution(const ProfilePolynomial& q, double t0) {
  const auto v = q.eval(t0);
  const double tol = 1e-9 * q.scale();
  if (std::abs(v.value) > tol || std::abs(v.derivative) > 1e-7 * q.scale()) {
    throw Error(ErrorKind::InvalidBracket, "constant solutions sit on double roots of q");
  }
  return ProfileSolution(q, ConstantKind{t0}, {{0.0, t0, 0.0}, {1.0, t0, 0.0}});
}

ProfileSolution solve_local(const ProfilePolynomial& q, double g0, double g_lo, double g_hi,
                            double u_span, const SolveOptions& options) {
  if (!(g0 > g_lo && g0 < g_hi && g0 > 0)) {
    throw Error(ErrorKind::ContractViolation, "g0 must lie inside (g_lo, g_hi)");
  }
  const double q0 = q(g0);
  if (!(q0 > 0)) throw Error(ErrorKind::ContractViolation, "q(g0) must be positive");
  const double gp0 = std::sqrt(q0);
  // Fast arcs (large q) would cross the window in a handful of knots; keep at
  // least ~512 knots per crossing so the Hermite table stays accurate.
  double speed = gp0;
  for (int i = 0; i <= 32; ++i) speed = std::max(speed, std::sqrt(std::max(0.0, q(g_lo + (g_hi - g_lo) * i / 32.0))));
  double spacing = std::min(options.knot_spacing, (g_hi - g_lo) / (512.0 * speed));
  const auto inside = [g_lo, g_hi](const ProfileSample& s) { return s.g > g_lo && s.g < g_hi; };
  for (int refine = 0;; ++refine, spacing *= 0.5) {
    const long max_knots = static_cast<long>(std::ceil(u_span / spacing));
    auto fwd = tabulate(q, {g0, gp0}, spacing, max_knots, options.tolerance, inside);
    auto bwd = tabulate(q, {g0, gp0}, -spacing, max_knots, options.tolerance, inside);
    if (fwd.size() + bwd.size() < 4) {
      throw Error(ErrorKind::IntegrationFailure, "local solution leaves its window immediately");
    }
    std::vector<ProfileSample> knots(bwd.rbegin(), bwd.rend());
    knots.insert(knots.end(), fwd.begin() + 1, fwd.end());
    const double u_min = knots.front().u, u_max = knots.back().u;
    ProfileSolution sol(q, LocalKind{g0, u_min, u_max}, std::move(knots));
    const double e = sol.energy_residual_max();
    if (e <= kRefineFraction * options.energy_tolerance) return sol;
    if (refine == kMaxRefinements) {
      if (e <= options.energy_tolerance) return sol;
      throw Error(ErrorKind::IntegrationFailure, "energy residual above tolerance");
    }
  }
}

}  // namespace cmc
