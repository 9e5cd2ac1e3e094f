#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"

#include "cmc/curvature_verify.hpp"
#include "cmc/error.hpp"
#include "cmc/io.hpp"
#include "cmc/moduli_classify.hpp"

namespace {

using namespace cmc;

enum Exit { kPass = 0, kVerifyFail = 1, kConfigError = 2, kEmpty = 3 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string command;
  std::string family;
  int n = 3;
  int k = 1;
  double h = 0.0;
  std::string c = "1";
  std::optional<double> r0;
  bool no_local = false;

  int base_samples = 8;
  int u_samples = 32;
  std::optional<double> u_min;
  std::optional<double> u_max;
  double step = 1e-4;
  std::uint64_t seed = 1;
  std::optional<double> tol;
  std::optional<double> tol_h;
  std::optional<double> tol_eigen;
  std::optional<double> tol_structural;

  int samples = 257;
  std::string out = "-";
  std::string summary;
  std::string format;
  unsigned threads = 0;

  std::string h_range;
  std::string c_range;
  bool c_relative = false;

  std::string grid = "16x64";
  std::string project = "1,2,3";
  int match_m = 0;
};

unsigned worker_count(unsigned requested) {
  unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CMC_FORGE_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

// "1.5", "auto", "auto+0.005", "auto-0.1"
double resolve_c(const std::string& text, ProfileFamily family, double h, int n) {
  if (text.rfind("auto", 0) == 0) {
    const double base = auto_c(family, h, n);
    const std::string rest = text.substr(4);
    if (rest.empty()) return base;
    std::size_t used = 0;
    double off = 0;
    try {
      off = std::stod(rest, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != rest.size() || (rest[0] != '+' && rest[0] != '-')) throw ConfigError("malformed c value '" + text + "'");
    return base + off;
  }
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) throw ConfigError("malformed c value '" + text + "'");
  return v;
}

struct Range {
  double lo, hi;
  int count;
  double at(int i) const { return count == 1 ? lo : lo + (hi - lo) * i / (count - 1); }
};

Range parse_range(const std::string& text, const char* what) {
  Range r{};
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%d%c", &r.lo, &r.hi, &r.count, &tail) != 3 || r.count < 0 ||
      !std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi) {
    throw ConfigError(std::string("malformed ") + what + " '" + text + "' (expected lo:hi:count with lo <= hi)");
  }
  return r;
}

ProfileFamily profile_family(const std::string& name) {
  try {
    return parse_profile_family(name);
  } catch (const Error&) {
    return descriptor(parse_family_id(name)).ode;
  }
}

FamilyId family_id(const std::string& name) {
  if (name.empty()) throw ConfigError("--family is required");
  return parse_family_id(name);
}

ImmersionInstance build_instance(const Options& o) {
  const FamilyId id = family_id(o.family);
  const FamilyDescriptor& d = descriptor(id);
  if (d.cylinder) {
    if (o.r0) return ImmersionInstance::cylinder(id, o.n, o.k, *o.r0);
    return make_cylinder(id, o.n, o.k, o.h);
  }
  InstanceOptions opt;
  opt.allow_local = !o.no_local;
  return make_instance(id, o.n, o.k, o.h, resolve_c(o.c, d.ode, o.h, o.n), opt);
}

struct Output {
  std::ofstream file;
  std::ostream* os;
  explicit Output(const std::string& path) : os(&std::cout) {
    if (path != "-" && !path.empty()) {
      file.open(path);
      if (!file) throw ConfigError("cannot open " + path);
      os = &file;
    }
  }
};

std::pair<double, double> window(const Options& o, const ImmersionInstance& inst) {
  const auto w = default_u_window(inst, o.step);
  return {o.u_min.value_or(w.first), o.u_max.value_or(w.second)};
}

int cmd_profile(const Options& o) {
  if (!o.format.empty() && o.format != "csv") throw ConfigError("profile writes csv only");
  const ProfileFamily fam = profile_family(o.family);
  const ProfilePolynomial q(fam, o.h, resolve_c(o.c, fam, o.h, o.n), o.n);
  const ProfileClass cls = classify_profile(q);
  std::unique_ptr<ProfileSolution> sol;
  double lo = 0, hi = 0;
  switch (cls.solution_class) {
    case SolutionClass::Periodic:
      sol = std::make_unique<ProfileSolution>(solve_periodic(q, *cls.t1, *cls.t2));
      lo = 0, hi = std::get<PeriodicKind>(sol->kind()).period;
      break;
    case SolutionClass::Unbounded:
      sol = std::make_unique<ProfileSolution>(solve_unbounded(q, *cls.root, 50.0 * std::max(1.0, *cls.root)));
      lo = sol->domain_min(), hi = sol->domain_max();
      break;
    case SolutionClass::Constant:
      sol = std::make_unique<ProfileSolution>(constant_solution(q, *cls.root));
      lo = 0, hi = 1;
      break;
    case SolutionClass::None: break;
  }
  const io::json summary = io::profile_summary(q, cls, sol.get());
  if (sol) {
    Output out(o.out);
    io::write_profile_csv(*out.os, *sol, o.u_min.value_or(lo), o.u_max.value_or(hi), o.samples);
  }
  if (!o.summary.empty()) {
    Output s(o.summary);
    *s.os << summary.dump(2) << '\n';
  } else {
    ((o.out == "-" || o.out.empty()) ? std::cerr : std::cout) << summary.dump(2) << '\n';
  }
  return sol ? kPass : kEmpty;
}

Tolerances tolerances(const Options& o) {
  Tolerances t;
  if (o.tol) {
    t.membership = t.unit_normal = t.orthogonality = t.profile_norm = *o.tol;
    t.eigen = t.mean_curvature = t.mu_identity = *o.tol;
  }
  if (o.tol_structural) t.membership = t.unit_normal = t.orthogonality = t.profile_norm = *o.tol_structural;
  if (o.tol_eigen) t.eigen = t.mu_identity = *o.tol_eigen;
  if (o.tol_h) t.mean_curvature = *o.tol_h;
  return t;
}

int cmd_verify(const Options& o) {
  if (!o.format.empty() && o.format != "json") throw ConfigError("verify writes json only");
  const ImmersionInstance inst = build_instance(o);
  GridSpec grid;
  grid.base_samples = o.base_samples;
  grid.u_samples = o.u_samples;
  grid.u_min = o.u_min;
  grid.u_max = o.u_max;
  grid.seed = o.seed;
  grid.step = o.step;
  const VerificationReport r = verify_instance(inst, grid, tolerances(o), worker_count(o.threads));
  Output out(o.out);
  *out.os << io::to_json(r).dump(2) << '\n';
  return r.pass ? kPass : kVerifyFail;
}

int cmd_classify(const Options& o) {
  const FamilyId id = family_id(o.family);
  const FamilyDescriptor& d = descriptor(id);
  const double c = d.cylinder ? 0.0 : resolve_c(o.c, d.ode, o.h, o.n);
  const ClassificationRecord rec = classify(id, o.n, o.k, o.h, c);
  Output out(o.out);
  *out.os << io::to_json(rec).dump(2) << '\n';
  return rec.solution_class == SolutionClass::None ? kEmpty : kPass;
}

int cmd_sweep(const Options& o) {
  if (!o.format.empty() && o.format != "jsonl") throw ConfigError("sweep writes jsonl only");
  if (o.out.empty() || o.out == "-") throw ConfigError("sweep needs --out <catalog.jsonl>");
  const FamilyId id = family_id(o.family);
  const FamilyDescriptor& d = descriptor(id);
  const Range hr = o.h_range.empty() ? Range{o.h, o.h, 1} : parse_range(o.h_range, "--h-range");
  const Range cr = o.c_range.empty() ? Range{0, 0, 1} : parse_range(o.c_range, "--c-range");
  const bool c_default = o.c_range.empty();

  std::vector<SweepPoint> points;
  for (int i = 0; i < hr.count; ++i) {
    const double h = hr.at(i);
    double base = 0.0;
    if (o.c_relative || (c_default && o.c.rfind("auto", 0) == 0)) {
      try {
        base = auto_c(d.ode, h, o.n);
      } catch (const Error&) {
        continue;  // no threshold at this h: nothing to offset from
      }
    }
    for (int j = 0; j < cr.count; ++j) {
      double c = c_default ? resolve_c(o.c, d.ode, h, o.n) : (o.c_relative ? base + cr.at(j) : cr.at(j));
      points.push_back({id, o.n, o.k, h, c});
    }
  }

  std::set<std::string> done;
  std::vector<io::json> existing;
  {
    std::ifstream in(o.out);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const io::json j = io::json::parse(line, nullptr, false);
      if (j.is_discarded()) throw ConfigError("catalog " + o.out + " has a malformed line");
      existing.push_back(j);
      done.insert(io::record_key(SweepPoint{parse_family_id(j.at("family").get<std::string>()), j.at("n").get<int>(),
                                            j.at("k").get<int>(), j.at("h").get<double>(), j.at("c").get<double>()}));
    }
  }
  std::vector<SweepPoint> todo;
  for (const auto& p : points) {
    if (!done.count(io::record_key(p))) todo.push_back(p);
  }

  std::ofstream cat(o.out, std::ios::app);
  if (!cat) throw ConfigError("cannot open " + o.out);
  const unsigned workers = worker_count(o.threads);
  constexpr std::size_t kChunk = 64;
  for (std::size_t at = 0; at < todo.size(); at += kChunk) {
    const std::vector<SweepPoint> chunk(todo.begin() + at, todo.begin() + std::min(todo.size(), at + kChunk));
    for (const auto& rec : sweep(chunk, workers)) {
      const io::json j = io::to_json(rec);
      cat << j.dump() << '\n';
      existing.push_back(j);
    }
    cat.flush();
  }

  std::string summary = o.summary;
  if (summary.empty()) {
    const auto dot = o.out.rfind('.');
    summary = (dot == std::string::npos ? o.out : o.out.substr(0, dot)) + ".csv";
  }
  std::ofstream csv(summary);
  if (!csv) throw ConfigError("cannot open " + summary);
  csv << io::summary_csv_header() << '\n';
  const auto num = [](const io::json& v) { return v.is_null() ? std::string() : io::fmt(v.get<double>()); };
  for (const auto& j : existing) {
    csv << j.at("family").get<std::string>() << ',' << j.at("n").get<int>() << ',' << j.at("k").get<int>() << ','
        << io::fmt(j.at("h").get<double>()) << ',' << io::fmt(j.at("c").get<double>()) << ','
        << j.at("class").get<std::string>() << ',' << num(j.at("T")) << ',' << num(j.at("theta_advance")) << ','
        << (j.at("closed").get<bool>() ? "true" : "false") << ',' << j.at("theorem_tag").get<std::string>() << '\n';
  }
  std::cerr << "sweep: " << points.size() << " points, " << todo.size() << " new, catalog " << o.out << '\n';
  return kPass;
}

std::vector<int> parse_project(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw ConfigError("malformed --project '" + text + "'");
    }
  }
  if (out.size() != 3) throw ConfigError("--project needs three slots");
  return out;
}

int write_mesh(const Options& o, const ImmersionInstance& inst, io::MeshOptions mo) {
  int nb = 0, nu = 0;
  char tail = 0;
  if (std::sscanf(o.grid.c_str(), "%dx%d%c", &nb, &nu, &tail) != 2 || nb < 2 || nu < 2) {
    throw ConfigError("malformed --grid '" + o.grid + "' (expected BxU)");
  }
  mo.base_count = nb;
  mo.u_count = nu;
  mo.project = parse_project(o.project);
  Output out(o.out);
  const io::MeshStats st = io::write_obj(*out.os, inst, mo);
  std::cerr << "mesh: " << st.vertices << " vertices, " << st.faces << " faces, max membership residual "
            << io::fmt(st.max_membership) << '\n';
  return kPass;
}

int cmd_mesh(const Options& o) {
  if (!o.format.empty() && o.format != "obj") throw ConfigError("mesh writes obj only");
  if (o.n != 2) throw ConfigError("mesh export needs n = 2");
  io::MeshOptions mo;
  if (o.match_m > 0) {
    if (family_id(o.family) != FamilyId::S4) throw ConfigError("--match-m applies to the S4 family");
    const AngleMatch m = match_angle(o.n, o.h, o.match_m);
    const ImmersionInstance inst = make_instance(FamilyId::S4, o.n, o.k, o.h, m.c);
    const ClosureResidual cr = closure_residual(inst, o.match_m);
    mo.u_min = 0.0;
    mo.u_max = o.match_m * *inst.period();
    mo.wrap_u = true;
    mo.comments.push_back("matched c " + io::fmt(m.c) + " theta_advance " + io::fmt(m.theta_advance) + " m " +
                          std::to_string(o.match_m));
    mo.comments.push_back("closure_residual rotation " + io::fmt(cr.rotation) + " full_turn " + io::fmt(cr.full_turn));
    return write_mesh(o, inst, mo);
  }
  const ImmersionInstance inst = build_instance(o);
  std::tie(mo.u_min, mo.u_max) = window(o, inst);
  return write_mesh(o, inst, mo);
}

int cmd_immerse(const Options& o) {
  const ImmersionInstance inst = build_instance(o);
  if (o.format == "obj") {
    if (o.n != 2) throw ConfigError("obj output needs n = 2");
    io::MeshOptions mo;
    std::tie(mo.u_min, mo.u_max) = window(o, inst);
    return write_mesh(o, inst, mo);
  }
  if (!o.format.empty() && o.format != "jsonl") throw ConfigError("immerse writes jsonl or obj");
  const auto [lo, hi] = window(o, inst);
  Output out(o.out);
  io::write_instance_jsonl(*out.os, inst, lo, hi, o.samples);
  return kPass;
}

int exit_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Unattainable:
    case ErrorKind::NoSignChange: return kEmpty;
    default: return kConfigError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cmc-forge: constant mean curvature hypersurfaces in pseudo-Riemannian space forms"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_config("--config", "", "TOML/INI file whose keys match the long flag names");
  app.require_subcommand(0, 1);

  Options o;
  app.add_option("--command", o.command, "Subcommand (for config files)");
  app.add_option("--family", o.family, "Family id (S1..E4, SCyl1..) or profile family (sphere-q, euc-p, ...)");
  app.add_option("-n,--n", o.n, "Dimension n");
  app.add_option("-k,--k", o.k, "Index k");
  app.add_option("-h,--h", o.h, "Mean curvature h");
  app.add_option("-c,--c", o.c, "Constant c: a number, auto, auto+d or auto-d");
  app.add_option("--r0", o.r0, "Cylinder radius (cylinder families)");
  app.add_flag("--no-local", o.no_local, "Refuse local solution arcs");
  app.add_option("--base-samples", o.base_samples, "Base points per verification");
  app.add_option("--u-samples", o.u_samples, "u samples per verification");
  app.add_option("--u-min", o.u_min, "Lower end of the u window");
  app.add_option("--u-max", o.u_max, "Upper end of the u window");
  app.add_option("--step", o.step, "Finite-difference step");
  app.add_option("--seed", o.seed, "Seed for base sampling");
  app.add_option("--tol", o.tol, "Override every tolerance");
  app.add_option("--tol-h", o.tol_h, "Mean-curvature tolerance");
  app.add_option("--tol-eigen", o.tol_eigen, "Eigen-residual tolerance");
  app.add_option("--tol-structural", o.tol_structural, "Structural tolerance");
  app.add_option("--samples", o.samples, "Rows for profile/immerse exports");
  app.add_option("--out,-o", o.out, "Output path ('-' for stdout)");
  app.add_option("--summary", o.summary, "Summary path (profile JSON, sweep CSV)");
  app.add_option("--format", o.format, "csv | jsonl | json | obj");
  app.add_option("--threads", o.threads, "Worker threads (capped by CMC_FORGE_THREADS)");
  app.add_option("--h-range", o.h_range, "Sweep h as lo:hi:count");
  app.add_option("--c-range", o.c_range, "Sweep c as lo:hi:count");
  app.add_flag("--c-relative", o.c_relative, "Sweep c as offsets from auto(h)");
  app.add_option("--grid", o.grid, "Mesh grid BxU");
  app.add_option("--project", o.project, "Ambient slots written as x,y,z");
  app.add_option("--match-m", o.match_m, "Mesh: match theta advance 2 pi / m (S4)");

  const std::vector<std::pair<std::string, std::string>> commands{
      {"profile", "Solve the profile ODE; CSV t,g,g_prime,energy_residual plus a JSON summary"},
      {"verify", "Finite-difference CMC verification report (exit 1 on failure)"},
      {"classify", "Classification record (exit 3 when no solution)"},
      {"sweep", "Classification catalog over an (h, c) grid"},
      {"immerse", "Instance samples u,r,lambda,mu,theta_or_R (or an OBJ mesh)"},
      {"mesh", "OBJ mesh of an n = 2 instance"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  std::string cmd = o.command;
  for (auto* sub : app.get_subcommands()) cmd = sub->get_name();
  try {
    if (cmd == "profile") return cmd_profile(o);
    if (cmd == "verify") return cmd_verify(o);
    if (cmd == "classify") return cmd_classify(o);
    if (cmd == "sweep") return cmd_sweep(o);
    if (cmd == "immerse") return cmd_immerse(o);
    if (cmd == "mesh") return cmd_mesh(o);
    std::cerr << "error: no command given (profile, verify, classify, sweep, immerse, mesh)\n";
    return kConfigError;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_for(e);
  }
}
