#include "doctest.h"

#include <sstream>
#include <string>

#include "cmc/io.hpp"

using namespace cmc;

TEST_CASE("number formatting round-trips") {
  for (double x : {0.1, 1.0 / 3, -2.5e-300, 6.02214076e23}) CHECK(std::stod(io::fmt(x)) == x);
}

TEST_CASE("profile csv") {
  ProfilePolynomial q(ProfileFamily::SphereP, 0.8, 5.0, 2);
  const auto cls = classify_profile(q);
  const auto sol = solve_periodic(q, *cls.t1, *cls.t2);
  std::ostringstream os;
  io::write_profile_csv(os, sol, 0.0, 1.0, 5);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "t,g,g_prime,energy_residual");
  int rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 3);
  }
  CHECK(rows == 5);
  const auto j = io::profile_summary(q, cls, &sol);
  CHECK(j["class"] == "periodic");
  CHECK(j["roots"].size() == 2);
}

TEST_CASE("classification record serialisation") {
  const auto rec = classify(FamilyId::S4, 2, 0, 0.8, 5.0);
  const auto j = io::to_json(rec);
  CHECK(j["family"] == "S4");
  CHECK(j["class"] == "periodic");
  CHECK(j["c"].get<double>() == 5.0);
  CHECK(j["closed"] == true);
  CHECK(j["theorem_tag"] == "S4/periodic/closed");
  CHECK(j.contains("theta_advance"));
  // parse back through text
  const auto back = io::json::parse(j.dump());
  CHECK(back["T"].get<double>() == *rec.period);

  CHECK(io::record_key(rec) == io::record_key(SweepPoint{FamilyId::S4, 2, 0, 0.8, 5.0}));
  const auto header = io::summary_csv_header();
  const auto row = io::summary_csv_row(rec);
  CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
  CHECK(row.rfind("S4,2,0,", 0) == 0);
}

TEST_CASE("verification report serialisation") {
  const auto inst = make_instance(FamilyId::S4, 2, 0, 0.8, 5.0);
  GridSpec g;
  g.base_samples = 2;
  g.u_samples = 2;
  const auto rep = verify_instance(inst, g);
  const auto j = io::to_json(rep);
  CHECK(j["pass"] == rep.pass);
  CHECK(j["grid"]["base_samples"] == 2);
  CHECK(j["residuals"]["mean_curvature"].get<double>() == rep.residuals.mean_curvature);
  CHECK(j["failures"].is_array());
}

TEST_CASE("instance samples as json lines") {
  const auto inst = make_instance(FamilyId::S4, 2, 0, 0.8, 5.0);
  std::ostringstream os;
  io::write_instance_jsonl(os, inst, 0.0, 1.0, 4);
  std::istringstream is(os.str());
  std::string line;
  int rows = 0;
  while (std::getline(is, line)) {
    const auto j = io::json::parse(line);
    CHECK(j.contains("theta_or_R"));
    CHECK(j["r"].get<double>() > 0);
    ++rows;
  }
  CHECK(rows == 4);
}

TEST_CASE("obj mesh") {
  const auto inst = make_instance(FamilyId::S4, 2, 0, 0.8, 5.0);
  io::MeshOptions opt;
  opt.base_count = 6;
  opt.u_count = 5;
  opt.u_max = *inst.period();
  opt.comments = {"test mesh"};
  std::ostringstream os;
  const auto st = io::write_obj(os, inst, opt);
  CHECK(st.vertices == 30);
  CHECK(st.closed_base);
  CHECK(st.faces == 6 * 4);
  CHECK(st.max_membership < 1e-12);
  const std::string text = os.str();
  CHECK(text.find("# test mesh") != std::string::npos);
  int v = 0, f = 0;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("v ", 0) == 0) ++v;
    if (line.rfind("f ", 0) == 0) ++f;
  }
  CHECK(v == st.vertices);
  CHECK(f == st.faces);

  opt.wrap_u = true;
  std::ostringstream wrapped;
  CHECK(io::write_obj(wrapped, inst, opt).faces == 6 * 5);
}
