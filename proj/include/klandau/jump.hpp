#pragma once

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "klandau/kernel.hpp"
#include "klandau/random.hpp"
#include "klandau/state.hpp"
#include "klandau/trajectory.hpp"
#include "klandau/vec3.hpp"

namespace klandau {

/// Support of the constraint p^2 = p.u: the sphere through the origin with
/// center u/2 and radius |u|/2. With u = v_j - v_i and the update
/// (v_i + p, v_j - p) every point of the sphere conserves energy exactly.
struct CollisionSphere {
  Vec3 center;
  double radius = 0.0;

  static CollisionSphere for_relative_velocity(const Vec3& u) { return {0.5 * u, 0.5 * norm(u)}; }
  double distance_from_surface(const Vec3& p) const { return std::abs(norm(p - center) - radius); }
};

/// lambda(u) = (1 / (2 n eps^4)) int dp w(p / eps) delta(p^2 - p.u)
///           = (1 / (2 n eps^4 |u|)) int_{S_u} w(|p| / eps) dS(p),
/// by sphere quadrature of the configured order. Zero below the degenerate
/// tolerance.
double pair_rate(const Vec3& u, const KernelConfig& kernel, std::size_t n);

/// Exchanged momentum on the collision sphere of u, density proportional to
/// w(|p|/eps) dS. Uniform area proposals, rejection against w(0).
Vec3 sample_exchanged_momentum(const Vec3& u, const KernelConfig& kernel, Rng& rng);

/// v_i += p, v_j -= p.
void apply_collision(SystemState& state, std::size_t i, std::size_t j, const Vec3& p);

struct JumpEvent {
  std::size_t i = 0, j = 0;
  Vec3 p;
  double waiting_time = std::numeric_limits<double>::infinity();
};

/// Exact stochastic simulation of the scaled Kac master equation. Keeps the
/// full table of ordered-pair rates; after a collision only rows i and j are
/// refreshed.
class JumpSimulator {
 public:
  JumpSimulator(SystemState state, KernelConfig kernel);

  const SystemState& state() const { return state_; }
  double total_rate() const { return total_; }
  double rate(std::size_t i, std::size_t j) const { return rates_[i * n_ + j]; }

  /// Draws the next event without applying it. waiting_time is +inf when
  /// every rate vanishes.
  JumpEvent propose(Rng& rng) const;
  /// Applies a proposed event and advances the clock.
  void commit(const JumpEvent& ev);
  /// Advances the clock only (no event before the given time).
  void advance_to(double t) { state_.time = t; }

  std::size_t events() const { return events_; }

 private:
  void refresh_row(std::size_t i);
  void resum();

  SystemState state_;
  KernelConfig kernel_;
  std::size_t n_;
  std::vector<double> rates_;
  std::vector<double> row_sums_;
  double total_ = 0.0;
  std::size_t events_ = 0;
};

/// One Gillespie step from scratch (full O(n^2) rate evaluation). Returns the
/// new state and the waiting time; with all rates zero the state is returned
/// unchanged and the waiting time is +inf.
std::pair<SystemState, double> step_jump(const SystemState& state, const KernelConfig& kernel, Rng& rng);

/// Runs the jump chain to `horizon`, recording snapshots on the schedule.
Trajectory run_jump(const SystemState& initial, const KernelConfig& kernel, double horizon,
                    double snapshot_interval, Rng& rng, bool keep_snapshots = true);

}  // namespace klandau
