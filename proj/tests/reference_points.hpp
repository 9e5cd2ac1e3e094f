#pragma once

// One valid parameter point per family, shared by the unit tests and the
// acceptance run.

#include <cmath>
#include <string>
#include <vector>

#include "cmc/moduli_classify.hpp"

namespace ref {

struct Point {
  cmc::FamilyId id;
  int n;
  int k;
  double h;   // ODE families
  double c;
  double r0;  // cylinders
};

inline std::vector<Point> points() {
  using cmc::FamilyId;
  const double c_s1 = cmc::threshold_c1(-0.95, 3) + 0.005;
  const double c_s2 = -(cmc::threshold_c0_outer(1.5, 3) + 0.1);
  return {
      {FamilyId::S1, 3, 1, -0.95, c_s1, 0},  {FamilyId::S2, 3, 1, 1.5, c_s2, 0},
      {FamilyId::S3, 3, 1, 0.5, 1.0, 0},     {FamilyId::S4, 2, 0, 0.8, 5.0, 0},
      {FamilyId::SCyl1, 3, 1, 0, 0, std::sqrt(2.0)},
      {FamilyId::SCyl2, 2, 1, 0, 0, 1.0},
      {FamilyId::H1, 3, 2, 0.5, 1.0, 0},     {FamilyId::H2, 3, 2, 0.5, -1.0, 0},
      {FamilyId::H3, 3, 2, 0.5, -1.0, 0},    {FamilyId::H4, 3, 1, 0.5, -1.0, 0},
      {FamilyId::H5, 3, 1, 0.5, 1.0, 0},
      {FamilyId::HCyl1, 3, 2, 0, 0, 0.5},
      {FamilyId::HCyl2, 3, 2, 0, 0, 2.0},
      {FamilyId::E1, 2, 0, 1.0, 5.0, 0},     {FamilyId::E2, 3, 2, 1.0, 5.0, 0},
      {FamilyId::E3, 3, 1, 1.0, 1.0, 0},     {FamilyId::E4, 3, 1, -1.0, -0.5, 0},
  };
}

inline cmc::ImmersionInstance build(const Point& p) {
  if (cmc::descriptor(p.id).cylinder) return cmc::ImmersionInstance::cylinder(p.id, p.n, p.k, p.r0);
  return cmc::make_instance(p.id, p.n, p.k, p.h, p.c);
}

}  // namespace ref
