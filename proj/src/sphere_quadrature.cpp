#include "klandau/sphere_quadrature.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <utility>

#include "klandau/error.hpp"

namespace klandau {
namespace {

// P_q(x) and P_q'(x) by the three-term recurrence.
std::pair<double, double> legendre(int q, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= q; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, q * (x * p1 - p0) / (x * x - 1.0)};
}

GaussLegendreRule build_rule(int q) {
  GaussLegendreRule rule;
  rule.nodes.resize(q);
  rule.weights.resize(q);
  for (int i = 0; i < (q + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(q, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(q, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[q - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[q - 1 - i] = w;
  }
  return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int q) {
  if (q < 2) throw Error("Gauss-Legendre order must be >= 2");
  thread_local std::map<int, GaussLegendreRule> cache;
  auto it = cache.find(q);
  if (it == cache.end()) it = cache.emplace(q, build_rule(q)).first;
  return it->second;
}

double SpherePanelRule::integrate(const std::function<double(const Vec3&)>& f) const {
  if (!(radius > 0.0)) return 0.0;
  // Orthonormal frame (e1, e2) perpendicular to the pole.
  const Vec3 helper = std::abs(pole.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  Vec3 e1 = cross(pole, helper);
  e1 *= 1.0 / norm(e1);
  const Vec3 e2 = cross(pole, e1);

  std::vector<double> edges{0.0};
  const double pi = std::numbers::pi;
  double width = std::min(first_panel, pi);
  while (edges.back() < pi) {
    edges.push_back(std::min(pi, edges.back() + width));
    width *= 2.0;
  }

  const GaussLegendreRule& gl = gauss_legendre(order);
  const int n_az = 2 * order;
  const double d_az = 2.0 * pi / n_az;
  std::vector<double> cos_az(n_az), sin_az(n_az);
  for (int k = 0; k < n_az; ++k) {
    cos_az[k] = std::cos((k + 0.5) * d_az);
    sin_az[k] = std::sin((k + 0.5) * d_az);
  }

  double total = 0.0;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double a = edges[p], b = edges[p + 1];
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double panel = 0.0;
    for (int i = 0; i < order; ++i) {
      const double theta = mid + half * gl.nodes[i];
      const double st = std::sin(theta), ct = std::cos(theta);
      double ring = 0.0;
      for (int k = 0; k < n_az; ++k) {
        const Vec3 dir = ct * pole + st * (cos_az[k] * e1 + sin_az[k] * e2);
        ring += f(center + radius * dir);
      }
      panel += gl.weights[i] * st * ring * d_az;
    }
    total += half * panel;
  }
  return total * radius * radius;
}

}  // namespace klandau
