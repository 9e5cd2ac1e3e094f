#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cmc/immersion_families.hpp"

namespace cmc {

struct EigenEstimate {
  double value;     // principal curvature read off the finite difference
  double residual;  // |dnu(w) + value w| / |w| in the max norm
};

/// Principal curvature along the base tangent v at (y, u): differentiates nu
/// along the curve u = const, y(t) = geodesic of the base through y with
/// velocity v. Central differences with one Richardson step (s, s/2).
EigenEstimate shape_operator_spherical(const ImmersionInstance& inst, const Vec& y, double u,
                                       const Vec& v, double step = 1e-4);

/// Principal curvature along d/du at (y, u).
EigenEstimate shape_operator_profile(const ImmersionInstance& inst, const Vec& y, double u,
                                     double step = 1e-4);

/// |(r lambda)' - mu r'| on a Richardson stencil, relative to max(1, |mu r'|).
double mu_identity_residual(const ImmersionInstance& inst, double u, double step = 1e-4);

/// Raw (non-extrapolated) central differences at step0, step0/2, ...; each
/// entry holds |lambda_est - lambda(u)| and |mu_est - mu(u)|.
struct ConvergenceStep {
  double step;
  double lambda_error;
  double mu_error;
};
std::vector<ConvergenceStep> fd_convergence(const ImmersionInstance& inst, const Vec& y, double u,
                                            const Vec& v, double step0 = 0.1, int halvings = 10);
/// True when every error above `floor` shrinks by at least `ratio` at the next step.
bool converges(const std::vector<ConvergenceStep>& steps, double floor = 1e-8, double ratio = 3.0);

struct Tolerances {
  double membership = 1e-8;
  double unit_normal = 1e-8;
  double orthogonality = 1e-8;
  double profile_norm = 1e-8;
  double eigen = 1e-6;
  double mean_curvature = 1e-5;
  double mu_identity = 1e-6;
};

struct GridSpec {
  int base_samples = 8;
  int u_samples = 32;
  std::optional<double> u_min;  // defaults depend on the solution kind
  std::optional<double> u_max;
  std::uint64_t seed = 1;
  double step = 1e-4;
};

struct Residuals {
  double membership = 0;     // |<phi,phi> - level|
  double unit_normal = 0;    // |<nu,nu> - normal_norm|
  double orthogonality = 0;  // <nu,phi_u>, <nu,dphi(v)>, <nu,phi>
  double profile_norm = 0;   // |<phi_u,phi_u> - profile_norm|
  double eigen_spherical = 0;
  double eigen_profile = 0;
  double mean_curvature = 0;  // |h_est - h|
  double mu_identity = 0;
  double lambda_table = 0;  // |lambda_est - lambda(u)|, informational
  double mu_table = 0;      // |mu_est - mu(u)|, informational

  void merge(const Residuals& o);
};

struct VerificationReport {
  std::string instance_id;
  GridSpec grid;
  double u_min = 0;
  double u_max = 0;
  int points = 0;
  Tolerances tolerances;
  Residuals residuals;
  double h_est_min = 0;
  double h_est_max = 0;
  std::vector<std::string> failures;  // residual names above tolerance, or error text
  bool pass = false;
};

/// Human-readable id, e.g. "S1 n=3 k=1 h=-0.95 c=1.28".
std::string instance_id(const ImmersionInstance& inst);

/// Default u-window covering one fundamental domain of the instance.
std::pair<double, double> default_u_window(const ImmersionInstance& inst, double step);

/// Aggregates every residual over the grid. `threads` = 0 picks the hardware
/// concurrency. Never throws on geometric failure; errors become report text.
VerificationReport verify_instance(const ImmersionInstance& inst, const GridSpec& grid = {},
                                   const Tolerances& tol = {}, unsigned threads = 0);

}  // namespace cmc
