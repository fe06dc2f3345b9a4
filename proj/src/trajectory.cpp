#include "klandau/trajectory.hpp"

#include <cmath>

#include "klandau/error.hpp"

namespace klandau {

void DiagnosticsRecord::record(const SystemState& s) {
  times.push_back(s.time);
  momentum.push_back(total_momentum(s));
  energy.push_back(total_energy(s));
}

std::vector<double> snapshot_schedule(double horizon, double interval) {
  if (!(horizon >= 0.0)) throw Error("horizon must be >= 0");
  std::vector<double> t{0.0};
  if (horizon == 0.0) return t;
  if (!(interval > 0.0)) interval = horizon;
  const auto k_max = static_cast<long>(std::floor(horizon / interval + 1e-9));
  for (long k = 1; k <= k_max; ++k) t.push_back(std::min(horizon, k * interval));
  if (horizon - t.back() > 1e-12 * horizon) t.push_back(horizon);
  return t;
}

}  // namespace klandau
