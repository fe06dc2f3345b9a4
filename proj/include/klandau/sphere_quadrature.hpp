#pragma once

#include <functional>
#include <vector>

#include "klandau/vec3.hpp"

namespace klandau {

struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// q-point Gauss-Legendre rule on [-1, 1]. Cached per thread.
const GaussLegendreRule& gauss_legendre(int q);

/// Product rule on the sphere |p - center| = radius, written in polar
/// coordinates about `pole` (a unit vector from the center to the pole
/// point). The polar angle is split into geometrically graded panels of
/// width `first_panel` near the pole, each integrated by q-point
/// Gauss-Legendre; the azimuth uses the 2q-point periodic trapezoid rule.
struct SpherePanelRule {
  Vec3 center;
  double radius = 0.0;
  Vec3 pole;
  double first_panel = 3.141592653589793;
  int order = 8;

  /// Surface integral of f over the sphere (dS measure).
  double integrate(const std::function<double(const Vec3&)>& f) const;
};

}  // namespace klandau
