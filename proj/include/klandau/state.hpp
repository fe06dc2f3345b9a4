#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "klandau/vec3.hpp"

namespace klandau {

/// Velocities of n particles plus the simulation clock. Particles carry no
/// position.
struct SystemState {
  std::vector<Vec3> velocities;
  double time = 0.0;

  SystemState() = default;
  explicit SystemState(std::vector<Vec3> v, double t = 0.0) : velocities(std::move(v)), time(t) {}

  std::size_t size() const { return velocities.size(); }

  /// Throws klandau::Error if n < 2 (unless allow_single), time < 0, or a
  /// component is not finite.
  void validate(bool allow_single = false) const;

  /// Flat 3n view, particle-major (v_1x, v_1y, v_1z, v_2x, ...).
  std::span<const double> flat() const {
    return {reinterpret_cast<const double*>(velocities.data()), 3 * velocities.size()};
  }
  std::span<double> flat() {
    return {reinterpret_cast<double*>(velocities.data()), 3 * velocities.size()};
  }

  friend bool operator==(const SystemState&, const SystemState&) = default;
};

static_assert(sizeof(Vec3) == 3 * sizeof(double), "Vec3 must be tightly packed");

Vec3 total_momentum(const SystemState& s);
double total_energy(const SystemState& s);

}  // namespace klandau
