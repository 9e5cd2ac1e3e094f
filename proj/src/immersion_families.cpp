#include "cmc/immersion_families.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

#include "cmc/error.hpp"
#include "cmc/quadrature.hpp"

namespace cmc {

namespace {

using PF = ProfileFamily;
using GC = GConstraint;
using FK = FrameKind;
using SP = SlotPattern;
using RF = RadialFactor;

// Sign bookkeeping follows the inner-product tables of each construction:
// <y,y> = base_level, <B2,B2> and <B3,B3> follow from frame kind and slots.
constexpr std::array<FamilyDescriptor, 17> kDescriptors{{
    // id        summary                                   ode      c  constr  k  base slots          frame        radial            amb  nu  phi  s2  s3  cyl   parent
    {FamilyId::S1, "de Sitter type, q1, c>0, r>1", PF::SphereQ, 1, GC::Above, 1, 1, SP::KAndKPlus1, FK::CoshSinh, RF::SqrtR2Minus1, 1, -1, 1, -1, -1, false, FamilyId::S1},
    {FamilyId::S2, "de Sitter type, q1, c<0", PF::SphereQ, -1, GC::Positive, 1, -1, SP::LastTwo, FK::CosSin, RF::SqrtR2Plus1, 1, -1, 1, -1, -1, false, FamilyId::S2},
    {FamilyId::S3, "de Sitter type, q1, c>0, r<1", PF::SphereQ, 1, GC::Below, 1, 1, SP::KAndKPlus1, FK::SinhCosh, RF::Sqrt1MinusR2, 1, -1, 1, 1, -1, false, FamilyId::S3},
    {FamilyId::S4, "sphere type, p1, c>0, r<1", PF::SphereP, 1, GC::Below, 0, 1, SP::LastTwo, FK::CosSin, RF::Sqrt1MinusR2, 1, 1, 1, 1, 1, false, FamilyId::S4},
    {FamilyId::SCyl1, "hyperbolic cylinder over S1, r0>1", PF::SphereQ, 1, GC::Above, 1, 1, SP::KAndKPlus1, FK::CoshSinh, RF::SqrtR2Minus1, 1, -1, 1, -1, -1, true, FamilyId::S1},
    {FamilyId::SCyl2, "cylinder over S2, r0 != 0", PF::SphereQ, -1, GC::Positive, 1, -1, SP::LastTwo, FK::CosSin, RF::SqrtR2Plus1, 1, -1, 1, -1, -1, true, FamilyId::S2},
    {FamilyId::H1, "anti de Sitter type, q2, c>0", PF::HypQ, 1, GC::Positive, 2, 1, SP::FirstTwo, FK::CosSin, RF::SqrtR2Plus1, -1, -1, 1, -1, -1, false, FamilyId::H1},
    {FamilyId::H2, "anti de Sitter type, q2, c<0, r<1", PF::HypQ, -1, GC::Below, 2, -1, SP::KAndKPlus1, FK::CoshSinh, RF::Sqrt1MinusR2, -1, -1, 1, 1, -1, false, FamilyId::H2},
    {FamilyId::H3, "anti de Sitter type, q2, c<0, r>1", PF::HypQ, -1, GC::Above, 2, -1, SP::KAndKPlus1, FK::SinhCosh, RF::SqrtR2Minus1, -1, -1, 1, -1, -1, false, FamilyId::H3},
    {FamilyId::H4, "hyperbolic type, p2, c<0, r>1", PF::HypP, -1, GC::Above, 1, -1, SP::LastTwo, FK::CosSin, RF::SqrtR2Minus1, -1, 1, 1, -1, 1, false, FamilyId::H4},
    {FamilyId::H5, "hyperbolic type, p2, c>0", PF::HypP, 1, GC::Positive, 1, 1, SP::KAndKPlus1, FK::CoshSinh, RF::SqrtR2Plus1, -1, 1, 1, -1, 1, false, FamilyId::H5},
    {FamilyId::HCyl1, "cylinder over H2, 0<|r0|<1", PF::HypQ, -1, GC::Below, 2, -1, SP::KAndKPlus1, FK::CoshSinh, RF::Sqrt1MinusR2, -1, -1, 1, 1, -1, true, FamilyId::H2},
    {FamilyId::HCyl2, "Lorentzian cylinder, H3 frame, r0^2>1", PF::HypQ, -1, GC::Above, 2, -1, SP::KAndKPlus1, FK::SinhCosh, RF::SqrtR2Minus1, -1, 1, -1, -1, -1, true, FamilyId::H3},
    {FamilyId::E1, "flat, p3, c>0, spherical base", PF::EucP, 1, GC::Positive, 0, 1, SP::Last, FK::Fixed, RF::Height, 0, 1, 1, 0, 1, false, FamilyId::E1},
    {FamilyId::E2, "flat, p3, c>0, hyperbolic base", PF::EucP, 1, GC::Positive, 2, -1, SP::First, FK::Fixed, RF::Height, 0, -1, -1, 0, 1, false, FamilyId::E2},
    {FamilyId::E3, "flat, q3, c>0, spherical base", PF::EucQ, 1, GC::Positive, 1, 1, SP::First, FK::Fixed, RF::Height, 0, -1, 1, 0, -1, false, FamilyId::E3},
    {FamilyId::E4, "flat, q3, c<0, hyperbolic base", PF::EucQ, -1, GC::Positive, 1, -1, SP::Last, FK::Fixed, RF::Height, 0, -1, 1, 0, -1, false, FamilyId::E4},
}};

constexpr std::array<std::string_view, 17> kNames{"S1",    "S2", "S3", "S4", "SCyl1", "SCyl2",
                                                   "H1",    "H2", "H3", "H4", "H5",    "HCyl1",
                                                   "HCyl2", "E1", "E2", "E3", "E4"};

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

double denominator(RadialFactor f, double r) {
  switch (f) {
    case RF::SqrtR2Minus1: return r * r - 1.0;
    case RF::SqrtR2Plus1: return r * r + 1.0;
    case RF::Sqrt1MinusR2: return 1.0 - r * r;
    case RF::Height: return 1.0;
  }
  return 1.0;
}

}  // namespace

std::string_view to_string(FamilyId id) { return kNames[static_cast<std::size_t>(id)]; }

FamilyId parse_family_id(std::string_view name) {
  const std::string key = lower(name);
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (lower(kNames[i]) == key) return static_cast<FamilyId>(i);
  }
  throw Error(ErrorKind::ContractViolation, "unknown family '" + std::string(name) + "'");
}

const FamilyDescriptor& descriptor(FamilyId id) { return kDescriptors[static_cast<std::size_t>(id)]; }

std::span<const FamilyDescriptor> all_descriptors() { return kDescriptors; }

ScalarIdentity scalar_identity(const FamilyDescriptor& d) {
  // (r')^2 = q(g)/|c| = sign(c) + s r^2 + sigma r^2 lambda^2
  const ProfilePolynomial probe(d.ode, 0.0, d.c_sign, 2);
  return {-probe.square_sign(), d.c_sign, probe.linear_sign()};
}

std::pair<int, int> frame_slots(const FamilyDescriptor& d, int n, int k) {
  switch (d.slots) {
    case SP::KAndKPlus1: return {k, k + 1};
    case SP::LastTwo: return {n + 1, n + 2};
    case SP::FirstTwo: return {1, 2};
    case SP::First: return {1, 1};
    case SP::Last: return {n + 1, n + 1};
  }
  return {1, 1};
}

AmbientSignature ambient_signature(const FamilyDescriptor& d, int n, int k) {
  return AmbientSignature(d.flat() ? n + 1 : n + 2, k);
}

QuadricSpec base_quadric(const FamilyDescriptor& d, int n, int k) {
  const auto [a, b] = frame_slots(d, n, k);
  std::vector<int> zeroed{a};
  if (b != a) zeroed.push_back(b);
  return QuadricSpec(ambient_signature(d, n, k), d.base_level, zeroed);
}

PrincipalPair lambda_mu(double g, double h, int n) {
  if (!(g > 0)) throw Error(ErrorKind::DomainError, "lambda/mu need g > 0");
  if (n < 2) throw Error(ErrorKind::DomainError, "lambda/mu need n >= 2");
  const double p = std::pow(g, -n);
  return {h + p, h - (n - 1) * p};
}

double radial_factor(RadialFactor f, double r) {
  if (f == RF::Height) return 1.0;
  const double d = denominator(f, r);
  if (!(d > 0)) throw Error(ErrorKind::SingularDenominator, "radial factor of a non-positive argument");
  return std::sqrt(d);
}

namespace {

void require_cylinder(FamilyId id) {
  if (!descriptor(id).cylinder) {
    throw Error(ErrorKind::FamilyMismatch, std::string(to_string(id)) + " is not a cylinder family");
  }
}

bool cylinder_radius_valid(double r0, FamilyId id) {
  switch (id) {
    case FamilyId::SCyl1: return r0 > 1.0;
    case FamilyId::SCyl2: return r0 != 0.0 && std::isfinite(r0);
    case FamilyId::HCyl1: return r0 != 0.0 && std::abs(r0) < 1.0;
    case FamilyId::HCyl2: return r0 * r0 > 1.0 && std::isfinite(r0);
    default: return false;
  }
}

}  // namespace

double cylinder_mean_curvature(double r0, int n, FamilyId variant) {
  require_cylinder(variant);
  if (n < 2) throw Error(ErrorKind::OutOfRange, "cylinder needs n >= 2");
  if (!cylinder_radius_valid(r0, variant)) {
    throw Error(ErrorKind::OutOfRange,
                "r0=" + std::to_string(r0) + " outside the range of " + std::string(to_string(variant)));
  }
  const FamilyDescriptor& d = descriptor(variant);
  const double f = radial_factor(d.radial, r0);
  return ((n - 1) * f / r0 - d.nu_b2_sign * r0 / f) / n;
}

std::vector<double> solve_cylinder_radius(double h, int n, FamilyId variant) {
  require_cylinder(variant);
  if (n < 2) throw Error(ErrorKind::OutOfRange, "cylinder needs n >= 2");
  // With s = F(r0)/r0 the curvature is ((n-1) s + p/s)/n, p = -s2, so
  // (n-1) s^2 - n h s + p = 0.
  const double p = -descriptor(variant).nu_b2_sign;
  const double disc = n * n * h * h - 4.0 * (n - 1) * p;
  std::vector<double> out;
  if (disc >= 0) {
    const double root = std::sqrt(disc);
    std::vector<double> slopes{(n * h + root) / (2.0 * (n - 1))};
    if (root > 0) slopes.push_back((n * h - root) / (2.0 * (n - 1)));
    for (double s : slopes) {
      if (s == 0.0 || !std::isfinite(s)) continue;
      const double sign = s > 0 ? 1.0 : -1.0;
      double r0 = std::numeric_limits<double>::quiet_NaN();
      switch (variant) {
        case FamilyId::SCyl1:
        case FamilyId::HCyl2:
          if (s * s < 1.0) r0 = sign / std::sqrt(1.0 - s * s);
          break;
        case FamilyId::SCyl2:
          if (s * s > 1.0) r0 = sign / std::sqrt(s * s - 1.0);
          break;
        case FamilyId::HCyl1: r0 = sign / std::sqrt(1.0 + s * s); break;
        default: break;
      }
      if (!std::isnan(r0) && cylinder_radius_valid(r0, variant) &&
          std::abs(cylinder_mean_curvature(r0, n, variant) - h) <= 1e-10 * std::max(1.0, std::abs(h))) {
        out.push_back(r0);
      }
    }
  }
  if (out.empty()) {
    throw Error(ErrorKind::Unattainable, "mean curvature " + std::to_string(h) + " is not attained by " +
                                             std::string(to_string(variant)));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------

ImmersionInstance::ImmersionInstance(const FamilyDescriptor& d, int n, int k)
    : desc_(&d),
      n_(n),
      k_(k),
      ambient_(ambient_signature(d, n, k)),
      base_(base_quadric(d, n, k)),
      slots_(frame_slots(d, n, k)) {
  if (k < d.k_min || k > n) {
    throw Error(ErrorKind::OutOfValidity, std::string(to_string(d.id)) + " requires " +
                                              std::to_string(d.k_min) + " <= k <= n");
  }
  if (!base_.non_empty()) {
    throw Error(ErrorKind::EmptyQuadric, "base quadric of " + std::string(to_string(d.id)) +
                                             " is empty for k=" + std::to_string(k));
  }
}

ImmersionInstance ImmersionInstance::from_solution(FamilyId id,
                                                   int k,
                                                   std::shared_ptr<const ProfileSolution> solution) {
  const FamilyDescriptor& d = cmc::descriptor(id);
  if (d.cylinder) throw Error(ErrorKind::FamilyMismatch, "use ImmersionInstance::cylinder");
  if (!solution) throw Error(ErrorKind::ContractViolation, "null solution");
  const ProfilePolynomial& q = solution->profile();
  if (q.family() != d.ode) {
    throw Error(ErrorKind::FamilyMismatch, std::string(to_string(id)) + " needs the " +
                                               std::string(to_string(d.ode)) + " profile");
  }
  if ((q.c() > 0 ? 1 : -1) != d.c_sign || q.c() == 0.0) {
    throw Error(ErrorKind::OutOfValidity, std::string(to_string(id)) + " requires c with sign " +
                                              std::to_string(d.c_sign));
  }
  ImmersionInstance inst(d, q.n(), k);
  inst.h_ = q.h();
  inst.c_scale_ = std::sqrt(std::abs(q.c()));
  inst.solution_ = std::move(solution);
  const double margin = inst.constraint_margin();
  const double required = d.constraint == GC::Positive ? 0.0 : 1e-6;
  if (!(margin > required)) {
    throw Error(ErrorKind::ConstraintViolation,
                "profile violates the g-constraint of " + std::string(to_string(id)) +
                    " (margin " + std::to_string(margin) + ")");
  }
  inst.build_angle_table();
  return inst;
}

ImmersionInstance ImmersionInstance::cylinder(FamilyId id, int n, int k, double r0) {
  const FamilyDescriptor& d = cmc::descriptor(id);
  ImmersionInstance inst(d, n, k);
  inst.h_ = cylinder_mean_curvature(r0, n, id);
  inst.r0_ = r0;
  const double f = radial_factor(d.radial, r0);
  inst.cyl_lambda_ = f / r0;
  inst.cyl_mu_ = -d.nu_b2_sign * r0 / f;
  return inst;
}

std::optional<double> ImmersionInstance::c() const noexcept {
  if (!solution_) return std::nullopt;
  return solution_->profile().c();
}

std::optional<QuadricSpec> ImmersionInstance::ambient_quadric() const {
  if (desc_->flat()) return std::nullopt;
  return QuadricSpec(ambient_, desc_->ambient_level);
}

double ImmersionInstance::domain_min() const noexcept {
  return solution_ ? solution_->domain_min() : -std::numeric_limits<double>::infinity();
}

double ImmersionInstance::domain_max() const noexcept {
  return solution_ ? solution_->domain_max() : std::numeric_limits<double>::infinity();
}

bool ImmersionInstance::in_domain(double u) const noexcept {
  return u >= domain_min() && u <= domain_max();
}

std::optional<double> ImmersionInstance::period() const noexcept {
  if (!solution_) return std::nullopt;
  if (const auto* p = std::get_if<PeriodicKind>(&solution_->kind())) return p->period;
  return std::nullopt;
}

double ImmersionInstance::constraint_margin() const {
  if (r0_) {
    const double r = std::abs(*r0_);
    switch (desc_->constraint) {
      case GC::Above: return r - 1.0;
      case GC::Below: return 1.0 - r;
      case GC::Positive: return r;
    }
  }
  switch (desc_->constraint) {
    case GC::Above: return solution_->min_g() / c_scale_ - 1.0;
    case GC::Below: return 1.0 - solution_->max_g() / c_scale_;
    case GC::Positive: return solution_->min_g();
  }
  return 0.0;
}

double ImmersionInstance::angle_rate(double u) const {
  const Frame f = frame(u);
  return theta_scale_ * f.r * f.lambda / denominator(desc_->radial, f.r);
}

void ImmersionInstance::build_angle_table() {
  angle_table_.clear();
  if (!solution_ || solution_->constant()) return;
  const auto& knots = solution_->samples();
  const double margin_floor = 1e-8;
  const auto rate = [this, margin_floor](double v) {
    const ProfileState s = solution_->table_state(v);
    const double r = s.g / c_scale_;
    const double d = denominator(desc_->radial, r);
    if (!(d > margin_floor)) throw Error(ErrorKind::SingularDenominator, "theta denominator vanishes");
    const double lambda = lambda_mu(s.g, h_, n_).lambda + h_shift_;
    return theta_scale_ * r * lambda / d;
  };
  angle_table_.reserve(knots.size());
  double acc = 0.0;
  angle_table_.push_back(0.0);
  for (std::size_t j = 0; j + 1 < knots.size(); ++j) {
    acc += quadrature::integrate(rate, knots[j].u, knots[j + 1].u, 1e-15, 1e-14).value;
    angle_table_.push_back(acc);
  }
  angle_origin_ = 0.0;
  for (std::size_t j = 0; j < knots.size(); ++j) {
    if (knots[j].u == 0.0) angle_origin_ = angle_table_[j];
  }
  if (solution_->periodic()) advance_ = 2.0 * (angle_table_.back() - angle_origin_);
}

double ImmersionInstance::table_angle(double v) const {
  const auto& knots = solution_->samples();
  const double u0 = knots.front().u;
  const double spacing = knots[1].u - knots[0].u;
  const long last = static_cast<long>(knots.size()) - 2;
  const long j = std::clamp(static_cast<long>(std::floor((v - u0) / spacing)), 0L, last);
  const double a = knots[static_cast<std::size_t>(j)].u;
  const auto rate = [this](double w) {
    const ProfileState s = solution_->table_state(w);
    const double r = s.g / c_scale_;
    const double lambda = lambda_mu(s.g, h_, n_).lambda + h_shift_;
    return theta_scale_ * r * lambda / denominator(desc_->radial, r);
  };
  const double partial = v == a ? 0.0 : quadrature::integrate(rate, a, v, 1e-15, 1e-14).value;
  return angle_table_[static_cast<std::size_t>(j)] + partial - angle_origin_;
}

ImmersionInstance::Frame ImmersionInstance::frame(double u) const {
  if (r0_) {
    const double r = *r0_;
    const double lambda = cyl_lambda_ + h_shift_;
    const double rate = theta_scale_ * r * lambda / denominator(desc_->radial, r);
    return {r, r, 0.0, lambda, cyl_mu_ + h_shift_, rate * u};
  }
  const auto fold = solution_->fold(u);
  ProfileState s = solution_->table_state(fold.v);
  if (fold.mirrored) s.g_prime = -s.g_prime;
  const auto lm = lambda_mu(s.g, h_, n_);
  Frame f{s.g, s.g / c_scale_, s.g_prime / c_scale_, lm.lambda + h_shift_, lm.mu + h_shift_, 0.0};
  if (solution_->constant()) {
    f.angle = u * theta_scale_ * f.r * f.lambda / denominator(desc_->radial, f.r);
    return f;
  }
  const double base = table_angle(fold.v);
  if (solution_->periodic()) {
    f.angle = fold.period_index * advance_ + (fold.mirrored ? advance_ - base : base);
  } else {
    f.angle = fold.mirrored ? -base : base;
  }
  return f;
}

double ImmersionInstance::theta(double u) const {
  if (desc_->flat()) throw Error(ErrorKind::FamilyMismatch, "theta is undefined for flat families");
  return frame(u).angle;
}

double ImmersionInstance::height(double u) const {
  if (!desc_->flat()) throw Error(ErrorKind::FamilyMismatch, "height is defined for flat families only");
  return frame(u).angle;
}

std::optional<double> ImmersionInstance::angle_advance() const {
  if (!solution_ || !solution_->periodic()) return std::nullopt;
  return advance_;
}

Vec ImmersionInstance::frame_b2(double angle) const {
  Vec b = Vec::Zero(ambient_.dim());
  const auto [a, c] = slots_;
  switch (desc_->frame) {
    case FK::CoshSinh: b(a - 1) = std::cosh(angle); b(c - 1) = std::sinh(angle); break;
    case FK::SinhCosh: b(a - 1) = std::sinh(angle); b(c - 1) = std::cosh(angle); break;
    case FK::CosSin: b(a - 1) = std::cos(angle); b(c - 1) = std::sin(angle); break;
    case FK::Fixed: b(a - 1) = 1.0; break;
  }
  return b;
}

Vec ImmersionInstance::frame_b3(double angle) const {
  Vec b = Vec::Zero(ambient_.dim());
  const auto [a, c] = slots_;
  switch (desc_->frame) {
    case FK::CoshSinh: b(a - 1) = std::sinh(angle); b(c - 1) = std::cosh(angle); break;
    case FK::SinhCosh: b(a - 1) = std::cosh(angle); b(c - 1) = std::sinh(angle); break;
    case FK::CosSin: b(a - 1) = -std::sin(angle); b(c - 1) = std::cos(angle); break;
    case FK::Fixed: b(a - 1) = 1.0; break;
  }
  return b;
}

void ImmersionInstance::check_point(const Vec& y, double u) const {
  if (y.size() != ambient_.dim()) {
    throw Error(ErrorKind::BasePointOffQuadric, "base point has the wrong dimension");
  }
  const auto res = quadric_residual(y, base_);
  if (std::abs(res.value) > 1e-10 || res.zeroed_slot_max > 1e-12) {
    throw Error(ErrorKind::BasePointOffQuadric, "base point residual " + std::to_string(res.value));
  }
  if (!in_domain(u)) throw Error(ErrorKind::DomainExceeded, "u=" + std::to_string(u) + " outside the domain");
}

Vec ImmersionInstance::evaluate(const Vec& y, double u, double angle_ref) const {
  check_point(y, u);
  Frame f = frame(u);
  f.angle -= angle_ref;
  if (desc_->flat()) return f.r * y + f.angle * frame_b2(0.0);
  return f.r * y + radial_factor(desc_->radial, f.r) * frame_b2(f.angle);
}

Vec ImmersionInstance::gauss_map(const Vec& y, double u, double angle_ref) const {
  check_point(y, u);
  Frame f = frame(u);
  f.angle -= angle_ref;
  if (desc_->flat()) return -f.r * f.lambda * y + desc_->nu_b3_sign * f.r_prime * frame_b2(0.0);
  const double F = radial_factor(desc_->radial, f.r);
  return -f.r * f.lambda * y + desc_->nu_b2_sign * (f.r * f.r * f.lambda / F) * frame_b2(f.angle) +
         desc_->nu_b3_sign * (f.r_prime / F) * frame_b3(f.angle);
}

ImmersionInstance ImmersionInstance::perturbed(double theta_scale, double h_shift) const {
  ImmersionInstance copy = *this;
  copy.theta_scale_ = theta_scale_ * theta_scale;
  copy.h_shift_ = h_shift_ + h_shift;
  if (copy.solution_) copy.build_angle_table();
  return copy;
}

std::vector<ImmersionInstance::Sample> ImmersionInstance::samples(double u_min, double u_max,
                                                                  int count) const {
  std::vector<Sample> out;
  if (count < 1) return out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double u = count == 1 ? u_min : u_min + (u_max - u_min) * i / (count - 1);
    const Frame f = frame(u);
    out.push_back({u, f.r, f.lambda, f.mu, f.angle});
  }
  return out;
}

}  // namespace cmc
