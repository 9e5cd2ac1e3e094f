#include "cmc/moduli_classify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "cmc/error.hpp"

namespace cmc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Margin of [lo, hi] (in g) from the constraint boundary, in units of r.
double constraint_margin_of(GConstraint c, double scale, double lo, double hi) {
  switch (c) {
    case GConstraint::Above: return lo / scale - 1.0;
    case GConstraint::Below: return 1.0 - hi / scale;
    case GConstraint::Positive: return lo;
  }
  return 0.0;
}

void check_validity(const FamilyDescriptor& d, int n, int k, double c) {
  if (n < 2) throw Error(ErrorKind::OutOfValidity, "n must be at least 2");
  if (k < d.k_min || k > n) {
    throw Error(ErrorKind::OutOfValidity, std::string(to_string(d.id)) + " needs " + std::to_string(d.k_min) +
                                              " <= k <= n, got k=" + std::to_string(k));
  }
  if (!d.cylinder && !(c * d.c_sign > 0)) {
    throw Error(ErrorKind::OutOfValidity, std::string(to_string(d.id)) + " needs c with sign " +
                                              (d.c_sign > 0 ? std::string("+") : std::string("-")));
  }
}

ClassificationRecord blank_record(FamilyId family, int n, int k, double h, double c) {
  ClassificationRecord r;
  r.family = family;
  r.n = n;
  r.k = k;
  r.h = h;
  r.c = c;
  return r;
}

bool complete_family(FamilyId id) { return id == FamilyId::S1 || id == FamilyId::S2 || id == FamilyId::E4; }

std::string tag_for(const ClassificationRecord& r) {
  std::string tag = std::string(to_string(r.family)) + "/" + std::string(to_string(r.solution_class));
  if (r.closed_flag) tag += "/closed";
  if (r.spacelike_complete_flag) tag += "/complete";
  return tag;
}

bool coercive(const ProfilePolynomial& q, bool& linear) {
  const double h = q.h();
  const int s = q.linear_sign(), sigma = q.square_sign();
  const double a = s + sigma * h * h;
  linear = false;
  if (a > 1e-14) return true;
  if (a < -1e-14) return false;
  const double limit = q.c() + (q.n() == 2 ? 2.0 * sigma * h : 0.0);
  linear = limit > 0;
  return linear;
}

struct Analysis {
  std::vector<Root> roots;
  std::optional<std::pair<double, double>> bracket;
  bool bracket_ok = false;
  std::optional<double> unbounded_root;
  bool unbounded_ok = false;
  bool linear = false;
  std::optional<double> double_root;
};

Analysis analyse(const FamilyDescriptor& d, const ProfilePolynomial& q) {
  Analysis a;
  a.roots = positive_roots(q);
  const double scale = std::sqrt(std::abs(q.c()));
  const auto ok = [&](double lo, double hi) { return constraint_margin_of(d.constraint, scale, lo, hi) > 1e-12; };
  for (std::size_t i = 0; i + 1 < a.roots.size(); ++i) {
    const Root& lo = a.roots[i];
    const Root& hi = a.roots[i + 1];
    if (lo.double_root || hi.double_root) continue;
    if (!(q(0.5 * (lo.t + hi.t)) > 0)) continue;
    const bool good = ok(lo.t, hi.t);
    if (!a.bracket || (good && !a.bracket_ok)) {
      a.bracket = {lo.t, hi.t};
      a.bracket_ok = good;
    }
  }
  if (!a.roots.empty()) {
    const Root& last = a.roots.back();
    if (!last.double_root && q.eval(last.t).derivative > 0 && coercive(q, a.linear)) {
      a.unbounded_root = last.t;
      a.unbounded_ok = ok(last.t, kInf);
    }
  }
  for (const Root& r : a.roots) {
    if (r.double_root && ok(r.t, r.t)) {
      a.double_root = r.t;
      break;
    }
  }
  return a;
}

}  // namespace

std::string_view to_string(SolutionClass c) {
  switch (c) {
    case SolutionClass::Periodic: return "periodic";
    case SolutionClass::Unbounded: return "unbounded";
    case SolutionClass::Constant: return "constant";
    case SolutionClass::None: return "none";
  }
  return "none";
}

ClassificationRecord classify(FamilyId family, int n, int k, double h, double c, const ClassifyOptions& options) {
  const FamilyDescriptor& d = descriptor(family);
  check_validity(d, n, k, c);
  ClassificationRecord rec = blank_record(family, n, k, h, c);

  if (d.cylinder) {
    try {
      const auto radii = solve_cylinder_radius(h, n, family);
      rec.solution_class = SolutionClass::Constant;
      rec.root = radii.front();
      rec.constraint_margin = constraint_margin_of(d.constraint, 1.0, std::abs(radii.front()), std::abs(radii.front()));
    } catch (const Error& e) {
      rec.note = e.what();
    }
    rec.theorem_tag = tag_for(rec);
    return rec;
  }

  const ProfilePolynomial q(d.ode, h, c, n);
  const Analysis a = analyse(d, q);
  const double scale = std::sqrt(std::abs(c));
  const bool complete_k1 = k == 1 && complete_family(family);

  if (a.bracket && (a.bracket_ok || !(a.unbounded_root && a.unbounded_ok))) {
    rec.solution_class = SolutionClass::Periodic;
    rec.t1 = a.bracket->first;
    rec.t2 = a.bracket->second;
    rec.constraint_margin = constraint_margin_of(d.constraint, scale, *rec.t1, *rec.t2);
    rec.closed_flag = a.bracket_ok;
    rec.spacelike_complete_flag = rec.closed_flag && complete_k1;
    try {
      if (options.compute_theta && rec.closed_flag) {
        auto sol = std::make_shared<const ProfileSolution>(solve_periodic(q, *rec.t1, *rec.t2, options.solve));
        const auto inst = ImmersionInstance::from_solution(family, k, sol);
        rec.period = inst.period();
        rec.theta_advance = inst.angle_advance();
      } else {
        rec.period = period_by_quadrature(q, *rec.t1, *rec.t2);
      }
    } catch (const Error& e) {
      rec.note = e.what();
    }
  } else if (a.unbounded_root) {
    rec.solution_class = SolutionClass::Unbounded;
    rec.root = a.unbounded_root;
    rec.linear_growth = a.linear;
    rec.constraint_margin = constraint_margin_of(d.constraint, scale, *rec.root, kInf);
    rec.spacelike_complete_flag = a.unbounded_ok && complete_k1;
    if (!a.unbounded_ok) rec.note = "minimum of the profile violates the g-constraint";
  } else if (a.double_root) {
    rec.solution_class = SolutionClass::Constant;
    rec.root = a.double_root;
    rec.constraint_margin = constraint_margin_of(d.constraint, scale, *rec.root, *rec.root);
  }
  rec.theorem_tag = tag_for(rec);
  return rec;
}

ProfileClass classify_profile(const ProfilePolynomial& q) {
  FamilyDescriptor free{};
  free.constraint = GConstraint::Positive;
  const Analysis a = analyse(free, q);
  ProfileClass out;
  if (a.bracket) {
    out.solution_class = SolutionClass::Periodic;
    out.t1 = a.bracket->first;
    out.t2 = a.bracket->second;
  } else if (a.unbounded_root) {
    out.solution_class = SolutionClass::Unbounded;
    out.root = a.unbounded_root;
    out.linear_growth = a.linear;
  } else if (a.double_root) {
    out.solution_class = SolutionClass::Constant;
    out.root = a.double_root;
  }
  return out;
}

double auto_c(ProfileFamily family, double h, int n) {
  if (family == ProfileFamily::SphereQ) {
    const Thresholds t = thresholds(h, n);
    if (t.c1) return *t.c1;
    if (t.c0_h_minus_one) return *t.c0_h_minus_one;
    if (t.c0_outer) return -*t.c0_outer;
  }
  const ProfilePolynomial q0(family, h, family == ProfileFamily::EucP || family == ProfileFamily::EucQ ? 1.0 : 0.0, n);
  const auto crit = critical_points(q0);
  if (crit.empty()) throw Error(ErrorKind::OutOfRange, "no critical point, so no threshold value of c");
  // q depends on c additively: q_c = q_{c0} + (c - c0).
  return q0.c() - q0(crit.back());
}

ImmersionInstance make_instance(FamilyId family, int n, int k, double h, double c, const InstanceOptions& options) {
  const FamilyDescriptor& d = descriptor(family);
  if (d.cylinder) throw Error(ErrorKind::FamilyMismatch, "use make_cylinder for cylinder families");
  check_validity(d, n, k, c);
  const ProfilePolynomial q(d.ode, h, c, n);
  const Analysis a = analyse(d, q);

  std::shared_ptr<const ProfileSolution> sol;
  if (a.bracket && a.bracket_ok) {
    sol = std::make_shared<const ProfileSolution>(solve_periodic(q, a.bracket->first, a.bracket->second, options.solve));
  } else if (a.unbounded_root && a.unbounded_ok) {
    const double horizon = options.horizon_factor * std::max(1.0, *a.unbounded_root);
    sol = std::make_shared<const ProfileSolution>(solve_unbounded(q, *a.unbounded_root, horizon, options.solve));
  } else if (a.double_root) {
    sol = std::make_shared<const ProfileSolution>(constant_solution(q, *a.double_root));
  } else if (options.allow_local) {
    // First interval where q > 0 and the g-constraint holds.
    const double scale = std::sqrt(std::abs(c));
    double c_lo = 0.0, c_hi = kInf;
    if (d.constraint == GConstraint::Above) c_lo = scale * (1.0 + 1e-3);
    if (d.constraint == GConstraint::Below) c_hi = scale * (1.0 - 1e-3);
    std::vector<double> cuts{0.0};
    for (const Root& r : a.roots) cuts.push_back(r.t);
    cuts.push_back(kInf);
    for (std::size_t i = 0; i + 1 < cuts.size() && !sol; ++i) {
      double lo = std::max(cuts[i], c_lo), hi = std::min(cuts[i + 1], c_hi);
      if (!(lo < hi)) continue;
      if (!std::isfinite(hi)) hi = lo + 2.0 * std::max(1.0, lo);
      if (lo == 0.0) lo = 0.25 * hi;
      const double mid = 0.5 * (lo + hi);
      if (!(q(mid) > 0)) continue;
      const double w = hi - lo;
      sol = std::make_shared<const ProfileSolution>(
          solve_local(q, mid, lo + 0.05 * w, hi - 0.05 * w, options.local_span, options.solve));
    }
  }
  if (!sol) {
    throw Error(ErrorKind::Unattainable, "no admissible profile for " + std::string(to_string(family)) +
                                             " at h=" + std::to_string(h) + " c=" + std::to_string(c));
  }
  return ImmersionInstance::from_solution(family, k, std::move(sol));
}

ImmersionInstance make_cylinder(FamilyId family, int n, int k, double h) {
  const auto radii = solve_cylinder_radius(h, n, family);
  return ImmersionInstance::cylinder(family, n, k, radii.front());
}

DesitterRange realizable_range_closed_desitter(int n) {
  if (n < 3) throw Error(ErrorKind::OutOfValidity, "closed de Sitter examples need n >= 3");
  return {{-1.0, -2.0 * std::sqrt(n - 1.0) / n, true, false},
          "h = -1: unbounded profile with c in (0, c0), g >= t2(c) > sqrt(c)",
          "h in (-1, -2 sqrt(n-1)/n): periodic profile with c in (c1, c1 + eps), g > sqrt(c)"};
}

CWindow desitter_c_window(double h, int n) {
  const double c1 = threshold_c1(h, n);
  ClassifyOptions opt;
  opt.compute_theta = false;
  int probes = 0;
  const auto closed = [&](double c) {
    ++probes;
    return classify(FamilyId::S1, n, 1, h, c, opt).closed_flag;
  };
  double good = std::numeric_limits<double>::quiet_NaN();
  double bad = std::numeric_limits<double>::quiet_NaN();
  for (int j = 40; j >= 1; --j) {
    const double c = c1 * (1.0 + std::ldexp(1.0, -j));
    if (std::isnan(good)) {
      // Offsets this small can still resolve as a double root; skip them.
      ++probes;
      if (classify(FamilyId::S1, n, 1, h, c, opt).solution_class == SolutionClass::Constant) continue;
    }
    if (closed(c)) {
      good = c;
    } else {
      bad = c;
      break;
    }
  }
  if (std::isnan(good)) {
    throw Error(ErrorKind::Unattainable, "no closed profile just above c1 at h=" + std::to_string(h));
  }
  if (std::isnan(bad)) return {c1, good, probes};
  for (int i = 0; i < 80 && bad - good > 1e-14 * bad; ++i) {
    const double mid = 0.5 * (good + bad);
    (closed(mid) ? good : bad) = mid;
  }
  return {c1, good, probes};
}

ImmersionInstance closed_desitter_instance(double h, int n, int k) {
  const auto range = realizable_range_closed_desitter(n);
  if (!range.range.contains(h)) {
    throw Error(ErrorKind::OutOfValidity, "h=" + std::to_string(h) + " outside the closed de Sitter range");
  }
  InstanceOptions opt;
  opt.allow_local = false;
  if (h == -1.0) return make_instance(FamilyId::S1, n, k, h, 0.9 * threshold_c0_h_minus_one(n), opt);
  const CWindow w = desitter_c_window(h, n);
  return make_instance(FamilyId::S1, n, k, h, 0.5 * (w.c_lo + w.c_hi), opt);
}

Interval embedded_window(int n, int m) {
  const double a = 1.0 / std::tan(M_PI / m);
  const double b = (m * m - 2.0) * std::sqrt(n - 1.0) / (n * std::sqrt(m * m - 1.0));
  return {a, b, false, false};
}

double s4_double_root_c(double h, int n) {
  const ProfilePolynomial q0(ProfileFamily::SphereP, h, 0.0, n);
  double best = kInf;
  for (double t : critical_points(q0)) best = std::min(best, -q0(t));
  if (!std::isfinite(best)) throw Error(ErrorKind::DomainError, "SphereP profile without a critical point");
  return best;
}

double s4_theta_advance(int n, double h, double c) {
  InstanceOptions opt;
  opt.allow_local = false;
  const auto inst = make_instance(FamilyId::S4, n, 0, h, c, opt);
  const auto adv = inst.angle_advance();
  if (!adv) throw Error(ErrorKind::Unattainable, "S4 profile is not periodic at c=" + std::to_string(c));
  return *adv;
}

AngleMatch match_angle(int n, double h, int m, std::optional<std::pair<double, double>> c_bracket) {
  if (m < 2) throw Error(ErrorKind::ContractViolation, "m must exceed 1");
  const double target = 2.0 * M_PI / m;
  const auto f = [&](double c) { return s4_theta_advance(n, h, c) - target; };
  double lo, hi, flo, fhi;
  if (c_bracket) {
    lo = c_bracket->first;
    hi = c_bracket->second;
    flo = f(lo);
    fhi = f(hi);
    if (flo * fhi > 0) throw Error(ErrorKind::NoSignChange, "theta advance does not cross 2 pi / m on the bracket");
  } else {
    const double c0 = s4_double_root_c(h, n);
    bool found = false;
    double prev_c = c0 * (1.0 + 1e-6), prev_f = f(prev_c);
    lo = hi = flo = fhi = 0;
    for (int i = 1; i <= 40 && !found; ++i) {
      const double c = c0 * (1.0 + std::pow(10.0, -6.0 + 0.25 * i));
      const double fc = f(c);
      if (prev_f * fc <= 0) {
        lo = prev_c, flo = prev_f, hi = c, fhi = fc;
        found = true;
      }
      prev_c = c, prev_f = fc;
    }
    if (!found) throw Error(ErrorKind::NoSignChange, "theta advance never reaches 2 pi / m above the double root");
  }
  int it = 0;
  double mid = lo, fm = flo;
  if (std::abs(fhi) < std::abs(flo)) mid = hi, fm = fhi;
  while (std::abs(fm) > 1e-11 && hi - lo > 1e-15 * std::abs(hi) && it < 200) {
    mid = 0.5 * (lo + hi);
    fm = f(mid);
    ++it;
    if ((fm < 0) == (flo < 0)) {
      lo = mid, flo = fm;
    } else {
      hi = mid, fhi = fm;
    }
  }
  return {mid, fm + target, it};
}

ClosureResidual closure_residual(const ImmersionInstance& inst, int m, int base_samples, int u_samples) {
  const auto T = inst.period();
  const auto adv = inst.angle_advance();
  if (!T || !adv) throw Error(ErrorKind::ContractViolation, "closure needs a periodic instance");
  const auto [sa, sb] = inst.slots();
  const auto transform = [&](Vec p) {
    const int a = sa - 1, b = sb - 1;
    const double x = p(a), y = p(b), t = *adv;
    switch (inst.descriptor().frame) {
      case FrameKind::CosSin:
        p(a) = std::cos(t) * x - std::sin(t) * y;
        p(b) = std::sin(t) * x + std::cos(t) * y;
        break;
      case FrameKind::CoshSinh:
      case FrameKind::SinhCosh:
        p(a) = std::cosh(t) * x + std::sinh(t) * y;
        p(b) = std::sinh(t) * x + std::cosh(t) * y;
        break;
      case FrameKind::Fixed: p(a) += t; break;
    }
    return p;
  };
  ClosureResidual out{0.0, 0.0};
  for (const BaseSample& s : sample_base(inst.base(), 7, base_samples)) {
    for (int j = 0; j < u_samples; ++j) {
      const double u = *T * j / u_samples;
      const Vec p = inst.evaluate(s.point, u);
      out.rotation = std::max(out.rotation, (inst.evaluate(s.point, u + *T) - transform(p)).cwiseAbs().maxCoeff());
      out.full_turn = std::max(out.full_turn, (inst.evaluate(s.point, u + m * *T) - p).cwiseAbs().maxCoeff());
    }
  }
  return out;
}

Minimum golden_section(const std::function<double(double)>& f, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol * std::max(1.0, std::abs(a) + std::abs(b))) {
    if (f1 < f2) {
      b = x2, x2 = x1, f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1, x1 = x2, f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

CylinderRange hyperbolic_cylinder_range(int n, FamilyId variant) {
  if (!descriptor(variant).cylinder) throw Error(ErrorKind::FamilyMismatch, "not a cylinder family");
  if (n < 2) throw Error(ErrorKind::OutOfRange, "n must be at least 2");
  const double m_star = 2.0 * std::sqrt(n - 1.0) / n;
  CylinderRange out{};
  double a = 0, b = 0;
  switch (variant) {
    case FamilyId::SCyl1:
    case FamilyId::HCyl2:
      out.range = n > 2 ? Interval{m_star, kInf, true, false} : Interval{1.0, kInf, false, false};
      a = 1.0 + 1e-9, b = 1e3;
      break;
    case FamilyId::HCyl1:
      // ((n-1) s - 1/s) / n is increasing in s = F / r0 > 0: every h occurs.
      out.range = {-kInf, kInf, false, false};
      a = 1e-6, b = 1.0 - 1e-9;
      break;
    default:  // SCyl2: s = F / r0 > 1 and h(s) increases there
      out.range = {1.0, kInf, false, false};
      a = 1e-3, b = 1e3;
      break;
  }
  const Minimum mn = golden_section([&](double r) { return cylinder_mean_curvature(r, n, variant); }, a, b);
  out.numeric_min = mn.value;
  out.argmin_r0 = mn.x;
  return out;
}

std::vector<RangeReport> hyperbolic_embedding_reports(int n) {
  if (n < 2) throw Error(ErrorKind::OutOfRange, "n must be at least 2");
  return {
      {FamilyId::H5, {0.0, kInf, true, false}, "embedded S^{n-1}_{k-1} x R for every h >= 0"},
      {FamilyId::H5, {1.0, kInf, false, false}, "embedded with O(n) x Z symmetry for h > 1"},
      {FamilyId::H4, {0.0, kInf, true, false}, "embedded H^{n-1}_{k-1} x R for every h >= 0"},
      {FamilyId::H4, {-kInf, -1.0, false, false},
       "embedded H^{n-1}_{k-1} x S^1 for h < h0(n) with some h0(n) < -1; h0(n) is not computed here"},
  };
}

std::vector<ClassificationRecord> sweep(const std::vector<SweepPoint>& points, unsigned threads,
                                        const ClassifyOptions& options) {
  std::vector<ClassificationRecord> out(points.size());
  std::atomic<std::size_t> next{0};
  const auto run = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      const SweepPoint& p = points[i];
      try {
        out[i] = classify(p.family, p.n, p.k, p.h, p.c, options);
      } catch (const std::exception& e) {
        ClassificationRecord r = blank_record(p.family, p.n, p.k, p.h, p.c);
        r.note = e.what();
        r.theorem_tag = std::string(to_string(p.family)) + "/none";
        out[i] = r;
      }
    }
  };
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(points.size(), 1)));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace cmc
