#include "cmc/io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "cmc/error.hpp"

namespace cmc::io {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string opt_csv(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

double energy_residual(const ProfilePolynomial& q, double g, double gp) {
  const double qv = q(g);
  return std::abs(gp * gp - qv) / std::max({1.0, gp * gp, std::abs(qv)});
}

}  // namespace

void write_profile_csv(std::ostream& os, const ProfileSolution& sol, double u_min, double u_max, int count) {
  os << "t,g,g_prime,energy_residual\n";
  for (int i = 0; i < count; ++i) {
    const double u = count == 1 ? u_min : u_min + (u_max - u_min) * i / (count - 1);
    const ProfileState s = sol.state(u);
    os << fmt(u) << ',' << fmt(s.g) << ',' << fmt(s.g_prime) << ',' << fmt(energy_residual(sol.profile(), s.g, s.g_prime))
       << '\n';
  }
}

json profile_summary(const ProfilePolynomial& q, const ProfileClass& cls, const ProfileSolution* sol) {
  json roots = json::array();
  for (const Root& r : positive_roots(q)) roots.push_back({{"t", r.t}, {"double", r.double_root}});
  json j{{"family", std::string(to_string(q.family()))},
         {"n", q.n()},
         {"h", q.h()},
         {"c", q.c()},
         {"roots", roots},
         {"critical_points", critical_points(q)},
         {"class", std::string(to_string(cls.solution_class))},
         {"t1", opt(cls.t1)},
         {"t2", opt(cls.t2)},
         {"root", opt(cls.root)},
         {"linear_growth", cls.linear_growth},
         {"period", nullptr}};
  if (sol) {
    if (const auto* p = std::get_if<PeriodicKind>(&sol->kind())) {
      j["period"] = p->period;
      j["period_ode"] = p->period_ode;
    }
    j["energy_residual_max"] = sol->energy_residual_max();
  }
  return j;
}

json to_json(const ClassificationRecord& r) {
  return {{"family", std::string(to_string(r.family))},
          {"n", r.n},
          {"k", r.k},
          {"h", r.h},
          {"c", r.c},
          {"class", std::string(to_string(r.solution_class))},
          {"t1", opt(r.t1)},
          {"t2", opt(r.t2)},
          {"root", opt(r.root)},
          {"T", opt(r.period)},
          {"theta_advance", opt(r.theta_advance)},
          {"closed", r.closed_flag},
          {"spacelike_complete", r.spacelike_complete_flag},
          {"linear_growth", r.linear_growth},
          {"constraint_margin", r.constraint_margin},
          {"theorem_tag", r.theorem_tag},
          {"note", r.note}};
}

std::string record_key(const SweepPoint& p) {
  return std::string(to_string(p.family)) + ',' + std::to_string(p.n) + ',' + std::to_string(p.k) + ',' + fmt(p.h) +
         ',' + fmt(p.c);
}

std::string record_key(const ClassificationRecord& r) { return record_key(SweepPoint{r.family, r.n, r.k, r.h, r.c}); }

std::string summary_csv_header() { return "family,n,k,h,c,class,T,theta_advance,closed,theorem_tag"; }

std::string summary_csv_row(const ClassificationRecord& r) {
  return record_key(r) + ',' + std::string(to_string(r.solution_class)) + ',' + opt_csv(r.period) + ',' +
         opt_csv(r.theta_advance) + ',' + (r.closed_flag ? "true" : "false") + ',' + r.theorem_tag;
}

json to_json(const VerificationReport& r) {
  const Residuals& x = r.residuals;
  const Tolerances& t = r.tolerances;
  return {{"instance_id", r.instance_id},
          {"grid",
           {{"base_samples", r.grid.base_samples},
            {"u_samples", r.grid.u_samples},
            {"u_min", r.u_min},
            {"u_max", r.u_max},
            {"seed", r.grid.seed},
            {"step", r.grid.step},
            {"points", r.points}}},
          {"residuals",
           {{"membership", x.membership},
            {"unit_normal", x.unit_normal},
            {"orthogonality", x.orthogonality},
            {"profile_norm", x.profile_norm},
            {"eigen_spherical", x.eigen_spherical},
            {"eigen_profile", x.eigen_profile},
            {"mean_curvature", x.mean_curvature},
            {"mu_identity", x.mu_identity},
            {"lambda_table", x.lambda_table},
            {"mu_table", x.mu_table}}},
          {"tolerances",
           {{"membership", t.membership},
            {"unit_normal", t.unit_normal},
            {"orthogonality", t.orthogonality},
            {"profile_norm", t.profile_norm},
            {"eigen", t.eigen},
            {"mean_curvature", t.mean_curvature},
            {"mu_identity", t.mu_identity}}},
          {"h_est", {{"min", r.h_est_min}, {"max", r.h_est_max}}},
          {"failures", r.failures},
          {"pass", r.pass}};
}

void write_instance_jsonl(std::ostream& os, const ImmersionInstance& inst, double u_min, double u_max, int count) {
  for (const auto& s : inst.samples(u_min, u_max, count)) {
    os << json{{"u", s.u}, {"r", s.r}, {"lambda", s.lambda}, {"mu", s.mu}, {"theta_or_R", s.angle}}.dump() << '\n';
  }
}

namespace {

// The base of an n = 2 instance is a curve in two free slots.
struct BaseCurve {
  int p, q;  // 0-based slots
  bool circle;
  double sign_p;  // hyperbola: x_p = sign_p cosh(a)
};

BaseCurve base_curve(const ImmersionInstance& inst) {
  const QuadricSpec& base = inst.base();
  const AmbientSignature& sig = inst.ambient();
  std::vector<int> free;
  for (int s = 1; s <= sig.dim(); ++s) {
    if (std::find(base.zeroed_slots().begin(), base.zeroed_slots().end(), s) == base.zeroed_slots().end()) {
      free.push_back(s);
    }
  }
  if (free.size() != 2) throw Error(ErrorKind::ContractViolation, "mesh export needs a one-dimensional base");
  const int level = base.level();
  const int sp = sig.axis_sign(free[0]), sq = sig.axis_sign(free[1]);
  if (sp == level && sq == level) return {free[0] - 1, free[1] - 1, true, 1.0};
  if (sp == level) return {free[0] - 1, free[1] - 1, false, 1.0};
  if (sq == level) return {free[1] - 1, free[0] - 1, false, 1.0};
  throw Error(ErrorKind::EmptyQuadric, "base curve is empty");
}

}  // namespace

MeshStats write_obj(std::ostream& os, const ImmersionInstance& inst, const MeshOptions& o) {
  if (inst.n() != 2) throw Error(ErrorKind::ContractViolation, "mesh export needs n = 2");
  const int dim = inst.ambient().dim();
  if (o.project.size() != 3) throw Error(ErrorKind::ContractViolation, "projection needs three slots");
  for (int s : o.project) {
    if (s < 1 || s > dim) throw Error(ErrorKind::ContractViolation, "projection slot out of range");
  }
  std::vector<int> rest;
  for (int s = 1; s <= dim; ++s) {
    if (std::find(o.project.begin(), o.project.end(), s) == o.project.end()) rest.push_back(s);
  }
  const BaseCurve bc = base_curve(inst);
  const int nb = o.base_count, nu = o.u_count;
  if (nb < 2 || nu < 2) throw Error(ErrorKind::ContractViolation, "mesh grid needs at least 2x2 samples");

  const auto base_point = [&](int i) {
    Vec y = Vec::Zero(dim);
    if (bc.circle) {
      const double a = 2.0 * M_PI * i / nb;
      y(bc.p) = std::cos(a);
      y(bc.q) = std::sin(a);
    } else {
      const double a = -2.0 + 4.0 * i / (nb - 1);
      y(bc.p) = std::cosh(a);
      y(bc.q) = std::sinh(a);
    }
    return y;
  };
  const auto u_at = [&](int j) { return o.u_min + (o.u_max - o.u_min) * j / (o.wrap_u ? nu : nu - 1); };

  std::vector<Vec> verts;
  std::vector<double> membership;
  const int level = inst.descriptor().ambient_level;
  MeshStats st;
  st.closed_base = bc.circle;
  for (int i = 0; i < nb; ++i) {
    const Vec y = base_point(i);
    for (int j = 0; j < nu; ++j) {
      const Vec p = inst.evaluate(y, u_at(j));
      const double res = level == 0 ? 0.0 : std::abs(inner(p, p, inst.ambient()) - level);
      verts.push_back(p);
      membership.push_back(res);
      st.max_membership = std::max(st.max_membership, res);
    }
  }
  st.vertices = static_cast<int>(verts.size());

  os << "# " << instance_id(inst) << '\n';
  os << "# grid " << nb << 'x' << nu << " base=" << (bc.circle ? "closed" : "open")
     << " u=" << (o.wrap_u ? "closed" : "open") << '\n';
  os << "# project x,y,z = slots " << o.project[0] << ',' << o.project[1] << ',' << o.project[2];
  if (!rest.empty()) os << "; vw = slot " << rest[0];
  os << '\n';
  for (const auto& line : o.comments) os << "# " << line << '\n';
  os << "# max_membership_residual " << fmt(st.max_membership) << '\n';
  for (std::size_t v = 0; v < membership.size(); ++v) os << "# membership " << v + 1 << ' ' << fmt(membership[v]) << '\n';

  for (const Vec& p : verts) {
    os << "v " << fmt(p(o.project[0] - 1)) << ' ' << fmt(p(o.project[1] - 1)) << ' ' << fmt(p(o.project[2] - 1)) << '\n';
    if (!rest.empty()) os << "# vw " << fmt(p(rest[0] - 1)) << '\n';
  }
  const int ib = bc.circle ? nb : nb - 1;
  const int ju = o.wrap_u ? nu : nu - 1;
  const auto idx = [&](int i, int j) { return (i % nb) * nu + (j % nu) + 1; };
  for (int i = 0; i < ib; ++i) {
    for (int j = 0; j < ju; ++j) {
      os << "f " << idx(i, j) << ' ' << idx(i + 1, j) << ' ' << idx(i + 1, j + 1) << ' ' << idx(i, j + 1) << '\n';
      ++st.faces;
    }
  }
  return st;
}

}  // namespace cmc::io
