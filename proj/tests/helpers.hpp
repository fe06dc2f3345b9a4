#pragma once

#include <cmath>
#include <vector>

#include "klandau/random.hpp"
#include "klandau/state.hpp"

namespace testing {

inline klandau::SystemState random_state(std::size_t n, klandau::Rng& rng, double scale = 1.0) {
  klandau::SystemState s;
  s.velocities.resize(n);
  for (auto& v : s.velocities) v = {scale * rng.normal(), scale * rng.normal(), scale * rng.normal()};
  return s;
}

inline std::vector<double> random_vector(std::size_t m, klandau::Rng& rng) {
  std::vector<double> x(m);
  for (double& v : x) v = rng.normal();
  return x;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace testing
