#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "klandau/interaction.hpp"
#include "klandau/random.hpp"
#include "klandau/state.hpp"
#include "klandau/trajectory.hpp"
#include "klandau/vec3.hpp"

namespace klandau {

struct DiffusionConfig {
  double dt = 1e-3;
  InteractionConfig interaction;
  /// c in dt <= c / G(V); see stability_rate().
  double stability_safety = 0.1;
  bool guard_enabled = true;

  void validate() const;
};

/// Ito drift of the divergence-form generator div(B^N grad): the row
/// divergence of B^N,
///   b_k = -(4/n) sum_j chibar(|w_kj|) w_kj / |w_kj|^{alpha+2},  w_kj = v_k - v_j.
/// The chibar' contribution vanishes identically because P(w) w = 0.
std::vector<Vec3> drift(const SystemState& state, const InteractionConfig& cfg);

/// Standard normals consumed by one noise increment, in draw order: 3 per
/// unordered pair (i<j, lexicographic), then 3 per particle if kappa > 0.
struct NoiseDraws {
  std::vector<double> pair;
  std::vector<double> particle;

  static NoiseDraws draw(std::size_t n, bool with_particle_noise, Rng& rng);
};

/// Maps Gaussian draws to increments with covariance 2 B^N dt: pair {i,j}
/// adds +-sqrt(2/n) sigma(v_i - v_j) G_ij to i and j, sigma(w) =
/// chibar^{1/2} |w|^{-alpha/2} P(w); kappa adds sqrt(2 kappa dt) G_i.
/// Deterministic for any worker count.
std::vector<Vec3> noise_from_draws(const SystemState& state, const InteractionConfig& cfg, double dt,
                                   const NoiseDraws& draws);

std::vector<Vec3> noise_increments(const SystemState& state, const InteractionConfig& cfg, double dt,
                                   Rng& rng);

/// Drift-Jacobian scale G(V) = max_k (4/n) sum_j chibar |w_kj|^{-alpha-2}.
/// The stability guard requires dt * G <= c.
double stability_rate(const SystemState& state, const InteractionConfig& cfg);

/// V <- V + b dt + noise; clock += dt. Throws "blow-up: reduce dt" on a
/// non-finite result, and when the guard is enabled and violated.
SystemState step_euler_maruyama(const SystemState& state, const DiffusionConfig& cfg, double dt, Rng& rng);

/// Euler-Maruyama to `horizon`. Steps of cfg.dt, shortened to land on
/// snapshot times and, when the guard is enabled, to satisfy dt * G <= c.
Trajectory run_diffusion(const SystemState& initial, const DiffusionConfig& cfg, double horizon,
                         double snapshot_interval, Rng& rng, bool keep_snapshots = true);

}  // namespace klandau
