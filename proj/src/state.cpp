#include "klandau/state.hpp"

#include <cmath>
#include <string>

#include "klandau/error.hpp"

namespace klandau {

void SystemState::validate(bool allow_single) const {
  if (velocities.size() < (allow_single ? 1u : 2u))
    throw Error("particle count must be >= 2, got " + std::to_string(velocities.size()));
  if (!(time >= 0.0) || !std::isfinite(time)) throw Error("state time must be finite and nonnegative");
  for (std::size_t i = 0; i < velocities.size(); ++i) {
    const Vec3& v = velocities[i];
    if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z))
      throw Error("non-finite velocity for particle " + std::to_string(i));
  }
}

Vec3 total_momentum(const SystemState& s) {
  Vec3 p;
  for (const Vec3& v : s.velocities) p += v;
  return p;
}

double total_energy(const SystemState& s) {
  double e = 0.0;
  for (const Vec3& v : s.velocities) e += norm2(v);
  return e;
}

}  // namespace klandau
