#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "klandau/state.hpp"
#include "klandau/vec3.hpp"

namespace klandau {

/// One weak-form residual evaluation, tagged by its cutoff delta.
struct ResidualRow {
  std::string phi;
  int j = 1;
  double delta = 0.0;
  double lhs = 0.0;
  double rhs_delta = 0.0;
  double remainder_delta = 0.0;
  double l_term = 0.0;
  double closure_z = 0.0;
};

/// Time series of observables aligned with a snapshot schedule. Per-run
/// drivers fill momentum and energy; ensemble post-processing fills the rest.
struct DiagnosticsRecord {
  std::vector<double> times;
  std::vector<Vec3> momentum;
  std::vector<double> energy;
  std::vector<double> entropy;
  std::vector<double> maxwellian_ks;
  std::vector<std::vector<double>> speed_histograms;
  std::vector<double> chaos;
  std::vector<ResidualRow> residuals;

  void record(const SystemState& s);
};

struct Trajectory {
  std::vector<SystemState> snapshots;
  DiagnosticsRecord diagnostics;
  /// Jump events (jump process) or Euler-Maruyama steps (diffusion).
  std::size_t events = 0;
};

/// Snapshot times 0, dt, 2 dt, ... up to and including the horizon.
std::vector<double> snapshot_schedule(double horizon, double interval);

}  // namespace klandau
