#include "cmc/curvature_verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <thread>

#include "cmc/error.hpp"

namespace cmc {

namespace {

double max_abs(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// Relative residual of an indefinite inner product: cancellations between
// large timelike and spacelike parts leave rounding proportional to |a||b|.
double rel(double value, double scale) { return std::abs(value) / std::max(1.0, scale); }

struct Geodesic {
  const Vec& y;
  const Vec& v;
  bool trig;
  Vec at(double t) const { return trig ? Vec(std::cos(t) * y + std::sin(t) * v) : Vec(std::cosh(t) * y + std::sinh(t) * v); }
};

Geodesic make_geodesic(const ImmersionInstance& inst, const Vec& y, const Vec& v) {
  const AmbientSignature& sig = inst.ambient();
  if (v.size() != y.size()) throw Error(ErrorKind::NonTangent, "tangent has the wrong dimension");
  const double vv = inner(v, v, sig);
  const double yv = inner(y, v, sig);
  const double scale = std::max(1.0, y.norm() * v.norm());
  bool zeroed_ok = true;
  for (int slot : inst.base().zeroed_slots()) zeroed_ok = zeroed_ok && v(slot - 1) == 0.0;
  if (std::abs(yv) > 1e-10 * scale || std::abs(std::abs(vv) - 1.0) > 1e-10 * std::max(1.0, v.squaredNorm()) ||
      !zeroed_ok) {
    throw Error(ErrorKind::NonTangent, "v is not a unit tangent of the base at y");
  }
  const double level = inst.base().level();
  return {y, v, (vv > 0) == (level > 0)};
}

Vec nu_along(const ImmersionInstance& inst, const Geodesic& c, double u, double t, double ref) {
  return inst.gauss_map(c.at(t), u, ref);
}

Vec central(const auto& f, double s) { return (f(s) - f(-s)) / (2.0 * s); }

Vec richardson(const auto& f, double s) {
  const Vec d1 = central(f, s);
  const Vec d2 = central(f, 0.5 * s);
  return (4.0 * d2 - d1) / 3.0;
}

void require_interior(const ImmersionInstance& inst, double u, double s) {
  if (!inst.in_domain(u - s) || !inst.in_domain(u + s)) {
    throw Error(ErrorKind::BoundaryU, "stencil around u=" + std::to_string(u) + " leaves the domain");
  }
}

double radius_at(const ImmersionInstance& inst, const Vec& y, double u, double ref) {
  const double level = inst.base().level();
  return inner(inst.evaluate(y, u, ref), y, inst.ambient()) / level;
}

EigenEstimate spherical_from(const ImmersionInstance& inst, const Geodesic& c, double u, double ref,
                             const Vec& dnu) {
  const double r = radius_at(inst, c.y, u, ref);
  if (r == 0.0) throw Error(ErrorKind::SingularDenominator, "r vanishes");
  const Vec w = dnu / r;
  const double vv = inner(c.v, c.v, inst.ambient());
  const double lambda = -inner(w, c.v, inst.ambient()) / vv;
  const double residual = max_abs(w + lambda * c.v) / (std::max(1.0, max_abs(c.v)) * (1.0 + std::abs(lambda)));
  return {lambda, residual};
}

struct ProfileDiff {
  Vec dphi;
  Vec dnu;
};

EigenEstimate profile_from(const ImmersionInstance& inst, const ProfileDiff& d) {
  const AmbientSignature& sig = inst.ambient();
  const double pp = inner(d.dphi, d.dphi, sig);
  if (std::abs(pp) < 1e-14 * std::max(1.0, d.dphi.squaredNorm())) {
    throw Error(ErrorKind::SingularDenominator, "d phi / du is null");
  }
  const double mu = -inner(d.dnu, d.dphi, sig) / pp;
  const double residual =
      max_abs(d.dnu + mu * d.dphi) / (std::max(1.0, max_abs(d.dphi)) * (1.0 + std::abs(mu)));
  return {mu, residual};
}

ProfileDiff profile_diff(const ImmersionInstance& inst, const Vec& y, double u, double ref, double s,
                         bool extrapolate) {
  require_interior(inst, u, s);
  const auto phi = [&](double t) { return inst.evaluate(y, u + t, ref); };
  const auto nu = [&](double t) { return inst.gauss_map(y, u + t, ref); };
  if (extrapolate) return {richardson(phi, s), richardson(nu, s)};
  return {central(phi, s), central(nu, s)};
}

}  // namespace

EigenEstimate shape_operator_spherical(const ImmersionInstance& inst, const Vec& y, double u,
                                       const Vec& v, double step) {
  const Geodesic c = make_geodesic(inst, y, v);
  const double ref = inst.frame(u).angle;
  const auto nu = [&](double t) { return nu_along(inst, c, u, t, ref); };
  return spherical_from(inst, c, u, ref, richardson(nu, step));
}

EigenEstimate shape_operator_profile(const ImmersionInstance& inst, const Vec& y, double u, double step) {
  return profile_from(inst, profile_diff(inst, y, u, inst.frame(u).angle, step, true));
}

double mu_identity_residual(const ImmersionInstance& inst, double u, double step) {
  require_interior(inst, u, step);
  const auto rl = [&](double t) {
    const auto f = inst.frame(u + t);
    Vec out(2);
    out << f.r * f.lambda, f.r;
    return out;
  };
  const Vec d = richardson(rl, step);
  const auto f = inst.frame(u);
  return rel(d(0) - f.mu * d(1), std::abs(f.mu * d(1)));
}

std::vector<ConvergenceStep> fd_convergence(const ImmersionInstance& inst, const Vec& y, double u,
                                            const Vec& v, double step0, int halvings) {
  const Geodesic c = make_geodesic(inst, y, v);
  const auto f = inst.frame(u);
  std::vector<ConvergenceStep> out;
  double s = step0;
  for (int i = 0; i <= halvings; ++i, s *= 0.5) {
    const auto nu = [&](double t) { return nu_along(inst, c, u, t, f.angle); };
    const EigenEstimate lam = spherical_from(inst, c, u, f.angle, central(nu, s));
    const EigenEstimate mu = profile_from(inst, profile_diff(inst, y, u, f.angle, s, false));
    out.push_back({s, std::abs(lam.value - f.lambda), std::abs(mu.value - f.mu)});
  }
  return out;
}

bool converges(const std::vector<ConvergenceStep>& steps, double floor, double ratio) {
  int checked = 0;
  for (std::size_t i = 1; i < steps.size(); ++i) {
    for (const auto& [prev, next] : {std::pair{steps[i - 1].lambda_error, steps[i].lambda_error},
                                    std::pair{steps[i - 1].mu_error, steps[i].mu_error}}) {
      if (prev <= floor) continue;
      ++checked;
      if (next > floor && next * ratio > prev) return false;
    }
  }
  return checked > 0;
}

void Residuals::merge(const Residuals& o) {
  membership = std::max(membership, o.membership);
  unit_normal = std::max(unit_normal, o.unit_normal);
  orthogonality = std::max(orthogonality, o.orthogonality);
  profile_norm = std::max(profile_norm, o.profile_norm);
  eigen_spherical = std::max(eigen_spherical, o.eigen_spherical);
  eigen_profile = std::max(eigen_profile, o.eigen_profile);
  mean_curvature = std::max(mean_curvature, o.mean_curvature);
  mu_identity = std::max(mu_identity, o.mu_identity);
  lambda_table = std::max(lambda_table, o.lambda_table);
  mu_table = std::max(mu_table, o.mu_table);
}

std::string instance_id(const ImmersionInstance& inst) {
  char buf[160];
  if (auto r0 = inst.cylinder_radius()) {
    std::snprintf(buf, sizeof buf, "%s n=%d k=%d r0=%.17g", std::string(to_string(inst.descriptor().id)).c_str(),
                  inst.n(), inst.k(), *r0);
  } else {
    std::snprintf(buf, sizeof buf, "%s n=%d k=%d h=%.17g c=%.17g",
                  std::string(to_string(inst.descriptor().id)).c_str(), inst.n(), inst.k(), inst.h(),
                  inst.c().value_or(0.0));
  }
  return buf;
}

std::pair<double, double> default_u_window(const ImmersionInstance& inst, double step) {
  const ProfileSolution* sol = inst.solution();
  if (!sol || sol->constant()) return {0.0, 2.0 * M_PI};
  if (auto T = inst.period()) return {0.0, *T};
  if (const auto* b = std::get_if<UnboundedKind>(&sol->kind())) {
    const double half = std::min(b->u_max - 4.0 * step, 3.0);
    return {-half, half};
  }
  const double lo = sol->domain_min(), hi = sol->domain_max();
  const double pad = 0.1 * (hi - lo) + 4.0 * step;
  return {lo + pad, hi - pad};
}

VerificationReport verify_instance(const ImmersionInstance& inst, const GridSpec& grid, const Tolerances& tol,
                                   unsigned threads) {
  VerificationReport report;
  report.instance_id = instance_id(inst);
  report.grid = grid;
  report.tolerances = tol;
  const auto window = default_u_window(inst, grid.step);
  report.u_min = grid.u_min.value_or(window.first);
  report.u_max = grid.u_max.value_or(window.second);

  std::vector<BaseSample> base;
  try {
    base = sample_base(inst.base(), grid.seed, grid.base_samples);
  } catch (const Error& e) {
    report.failures.push_back(std::string("base sampling: ") + e.what());
    return report;
  }
  const int nu_samples = std::max(1, grid.u_samples);
  const bool periodic = inst.period().has_value() && !grid.u_max;
  const auto u_at = [&](int j) {
    if (nu_samples == 1) return report.u_min;
    const double denom = periodic ? nu_samples : nu_samples - 1;
    return report.u_min + (report.u_max - report.u_min) * j / denom;
  };

  const std::size_t total = base.size() * static_cast<std::size_t>(nu_samples);
  report.points = static_cast<int>(total);
  const int n = inst.n();
  const double h = inst.h();
  const double level = inst.descriptor().ambient_level;
  const double nn = inst.descriptor().normal_norm;
  const double pn = inst.descriptor().profile_norm;
  const AmbientSignature& sig = inst.ambient();

  struct Partial {
    Residuals res;
    double hmin = std::numeric_limits<double>::infinity();
    double hmax = -std::numeric_limits<double>::infinity();
    std::vector<std::pair<std::size_t, std::string>> errors;
  };

  const auto work = [&](std::size_t idx, Partial& part) {
    const BaseSample& b = base[idx / nu_samples];
    const double u = u_at(static_cast<int>(idx % nu_samples));
    try {
      // All evaluations at this point share one frame isometry (see evaluate).
      const auto f = inst.frame(u);
      const Vec phi = inst.evaluate(b.point, u, f.angle);
      const Vec nu = inst.gauss_map(b.point, u, f.angle);
      const Geodesic c = make_geodesic(inst, b.point, b.tangent);
      const auto nu_t = [&](double t) { return nu_along(inst, c, u, t, f.angle); };
      const EigenEstimate lam = spherical_from(inst, c, u, f.angle, richardson(nu_t, grid.step));
      const ProfileDiff d = profile_diff(inst, b.point, u, f.angle, grid.step, true);
      const EigenEstimate mu = profile_from(inst, d);

      Residuals r;
      if (level != 0) r.membership = rel(inner(phi, phi, sig) - level, phi.squaredNorm());
      r.unit_normal = rel(inner(nu, nu, sig) - nn, nu.squaredNorm());
      double orth = rel(inner(nu, d.dphi, sig), nu.norm() * d.dphi.norm());
      orth = std::max(orth, rel(inner(nu, b.tangent, sig), nu.norm() * b.tangent.norm()));
      if (level != 0) orth = std::max(orth, rel(inner(nu, phi, sig), nu.norm() * phi.norm()));
      r.orthogonality = orth;
      r.profile_norm = rel(inner(d.dphi, d.dphi, sig) - pn, d.dphi.squaredNorm());
      r.eigen_spherical = lam.residual;
      r.eigen_profile = mu.residual;
      const double h_est = ((n - 1) * lam.value + mu.value) / n;
      r.mean_curvature = std::abs(h_est - h);
      r.mu_identity = mu_identity_residual(inst, u, grid.step);
      r.lambda_table = std::abs(lam.value - f.lambda);
      r.mu_table = std::abs(mu.value - f.mu);
      part.res.merge(r);
      part.hmin = std::min(part.hmin, h_est);
      part.hmax = std::max(part.hmax, h_est);
    } catch (const std::exception& e) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "point u=%.6g: ", u);
      part.errors.emplace_back(idx, buf + std::string(e.what()));
    }
  };

  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(1, total)));
  std::vector<Partial> parts(workers);
  std::atomic<std::size_t> next{0};
  const auto run = [&](unsigned w) {
    for (std::size_t i = next++; i < total; i = next++) work(i, parts[w]);
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }

  report.h_est_min = std::numeric_limits<double>::infinity();
  report.h_est_max = -std::numeric_limits<double>::infinity();
  std::vector<std::pair<std::size_t, std::string>> errors;
  for (const Partial& p : parts) {
    report.residuals.merge(p.res);
    report.h_est_min = std::min(report.h_est_min, p.hmin);
    report.h_est_max = std::max(report.h_est_max, p.hmax);
    errors.insert(errors.end(), p.errors.begin(), p.errors.end());
  }
  std::sort(errors.begin(), errors.end());
  for (std::size_t i = 0; i < errors.size() && i < 5; ++i) report.failures.push_back(errors[i].second);
  if (errors.size() > 5) report.failures.push_back(std::to_string(errors.size() - 5) + " more point errors");

  const Residuals& r = report.residuals;
  const std::pair<const char*, std::pair<double, double>> checks[] = {
      {"membership", {r.membership, tol.membership}},
      {"unit_normal", {r.unit_normal, tol.unit_normal}},
      {"orthogonality", {r.orthogonality, tol.orthogonality}},
      {"profile_norm", {r.profile_norm, tol.profile_norm}},
      {"eigen_spherical", {r.eigen_spherical, tol.eigen}},
      {"eigen_profile", {r.eigen_profile, tol.eigen}},
      {"mean_curvature", {r.mean_curvature, tol.mean_curvature}},
      {"mu_identity", {r.mu_identity, tol.mu_identity}},
  };
  for (const auto& [name, vt] : checks) {
    if (!(vt.first <= vt.second)) report.failures.push_back(name);
  }
  report.pass = report.failures.empty() && total > 0;
  return report;
}

}  // namespace cmc
