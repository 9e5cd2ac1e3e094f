#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "cmc/curvature_verify.hpp"
#include "cmc/moduli_classify.hpp"

namespace cmc::io {

using nlohmann::json;

/// "%.17g": round-trip exact decimal text.
std::string fmt(double x);

/// Columns t,g,g_prime,energy_residual over `count` evenly spaced parameters.
void write_profile_csv(std::ostream& os, const ProfileSolution& sol, double u_min, double u_max, int count);

json profile_summary(const ProfilePolynomial& q, const ProfileClass& cls, const ProfileSolution* sol);

json to_json(const ClassificationRecord& r);
/// Key identifying a sweep point: family,n,k,h,c at full precision.
std::string record_key(const ClassificationRecord& r);
std::string record_key(const SweepPoint& p);
std::string summary_csv_header();
std::string summary_csv_row(const ClassificationRecord& r);

json to_json(const VerificationReport& r);

/// One JSON object {u, r, lambda, mu, theta_or_R} per line.
void write_instance_jsonl(std::ostream& os, const ImmersionInstance& inst, double u_min, double u_max, int count);

struct MeshOptions {
  int base_count = 16;
  int u_count = 64;
  double u_min = 0.0;
  double u_max = 1.0;
  bool wrap_u = false;  // identify u_max with u_min (closed in u)
  std::vector<int> project{1, 2, 3};  // 1-based ambient slots written as x y z
  std::vector<std::string> comments;  // extra header lines
};

struct MeshStats {
  int vertices = 0;
  int faces = 0;
  double max_membership = 0.0;
  bool closed_base = false;
};

/// Indexed quad OBJ over (base angle, u) for n = 2. Slots not projected go to
/// a "# vw" comment after each vertex.
MeshStats write_obj(std::ostream& os, const ImmersionInstance& inst, const MeshOptions& options);

}  // namespace cmc::io
