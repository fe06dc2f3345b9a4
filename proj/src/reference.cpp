#include "klandau/reference.hpp"

#include <cmath>

#include "klandau/error.hpp"

namespace klandau::reference {

double quadratic_form(const SystemState& state, const InteractionConfig& cfg, std::span<const double> xi) {
  const std::size_t n = state.size();
  if (xi.size() != 3 * n) throw Error("xi must have 3n entries");
  auto block = [&](std::size_t i) { return Vec3{xi[3 * i], xi[3 * i + 1], xi[3 * i + 2]}; };
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const Mat3 a = pair_matrix(state.velocities[i] - state.velocities[j], cfg);
      const Vec3 d = block(i) - block(j);
      sum += dot(d, a * d);
    }
  double xi2 = 0.0;
  for (double x : xi) xi2 += x * x;
  return sum / (2.0 * static_cast<double>(n)) + cfg.identity_weight * xi2;
}

std::vector<Vec3> drift(const SystemState& state, const InteractionConfig& cfg) {
  const std::size_t n = state.size();
  std::vector<Vec3> b(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec3 w = state.velocities[i] - state.velocities[j];
      const double r = norm(w);
      // div a^N(w) = -2 chibar(|w|) w / |w|^{alpha+2}
      const double c = pair_coefficient(r, cfg);
      if (c == 0.0) continue;
      const Vec3 div_a = (-2.0 * c / (r * r)) * w;
      b[i] += (2.0 / static_cast<double>(n)) * div_a;
      b[j] -= (2.0 / static_cast<double>(n)) * div_a;
    }
  return b;
}

std::vector<Vec3> noise_from_draws(const SystemState& state, const InteractionConfig& cfg, double dt,
                                   const NoiseDraws& draws) {
  const std::size_t n = state.size();
  std::vector<Vec3> eta(n);
  const double scale = std::sqrt(2.0 * dt / static_cast<double>(n));
  std::size_t idx = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j, ++idx) {
      const Vec3 w = state.velocities[i] - state.velocities[j];
      const double c = pair_coefficient(norm(w), cfg);
      if (c == 0.0) continue;
      const Vec3 g{draws.pair[3 * idx], draws.pair[3 * idx + 1], draws.pair[3 * idx + 2]};
      const Vec3 inc = (scale * std::sqrt(c)) * (projection_matrix(w) * g);
      eta[i] += inc;
      eta[j] -= inc;
    }
  if (cfg.identity_weight > 0.0) {
    const double s = std::sqrt(2.0 * cfg.identity_weight * dt);
    for (std::size_t i = 0; i < n; ++i)
      eta[i] += s * Vec3{draws.particle[3 * i], draws.particle[3 * i + 1], draws.particle[3 * i + 2]};
  }
  return eta;
}

}  // namespace klandau::reference
