#include "klandau/jump.hpp"

#include <cmath>
#include <numbers>

#include "klandau/error.hpp"
#include "klandau/sphere_quadrature.hpp"

namespace klandau {

double pair_rate(const Vec3& u, const KernelConfig& kernel, std::size_t n) {
  const double u_norm = norm(u);
  if (u_norm <= kernel.degenerate_tolerance || u_norm == 0.0) return 0.0;
  const CollisionSphere sphere = CollisionSphere::for_relative_velocity(u);
  SpherePanelRule rule;
  rule.center = sphere.center;
  rule.radius = sphere.radius;
  rule.pole = (-1.0 / u_norm) * u;
  rule.first_panel = std::min(std::numbers::pi, kernel.epsilon / sphere.radius);
  rule.order = kernel.quadrature_order;
  const double surface = rule.integrate([&](const Vec3& p) { return kernel.scaled_value(norm(p)); });
  const double eps2 = kernel.epsilon * kernel.epsilon;
  return surface / (2.0 * static_cast<double>(n) * eps2 * eps2 * u_norm);
}

Vec3 sample_exchanged_momentum(const Vec3& u, const KernelConfig& kernel, Rng& rng) {
  const CollisionSphere sphere = CollisionSphere::for_relative_velocity(u);
  if (sphere.radius <= 0.5 * kernel.degenerate_tolerance) throw Error("degenerate collision sphere");
  const double w_max = kernel.profile_max();
  for (std::size_t it = 0; it < kernel.rejection_cap; ++it) {
    const double z = 2.0 * rng.uniform() - 1.0;
    const double az = 2.0 * std::numbers::pi * rng.uniform();
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    const Vec3 p = sphere.center + sphere.radius * Vec3{s * std::cos(az), s * std::sin(az), z};
    if (rng.uniform() * w_max < kernel.scaled_value(norm(p))) return p;
  }
  throw Error("kernel too concentrated for rejection sampling");
}

void apply_collision(SystemState& state, std::size_t i, std::size_t j, const Vec3& p) {
  state.velocities[i] += p;
  state.velocities[j] -= p;
}

JumpSimulator::JumpSimulator(SystemState state, KernelConfig kernel)
    : state_(std::move(state)), kernel_(kernel), n_(state_.size()) {
  state_.validate();
  kernel_.validate();
  rates_.assign(n_ * n_, 0.0);
  row_sums_.assign(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j) {
      const double r = pair_rate(state_.velocities[j] - state_.velocities[i], kernel_, n_);
      rates_[i * n_ + j] = r;
      rates_[j * n_ + i] = r;
    }
  resum();
}

void JumpSimulator::resum() {
  total_ = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) s += rates_[i * n_ + j];
    row_sums_[i] = s;
    total_ += s;
  }
}

void JumpSimulator::refresh_row(std::size_t i) {
  for (std::size_t j = 0; j < n_; ++j) {
    if (j == i) continue;
    // w is radial, so the rate depends on |v_j - v_i| only and is symmetric.
    const double r = pair_rate(state_.velocities[j] - state_.velocities[i], kernel_, n_);
    rates_[i * n_ + j] = r;
    rates_[j * n_ + i] = r;
  }
}

JumpEvent JumpSimulator::propose(Rng& rng) const {
  JumpEvent ev;
  if (!(total_ > 0.0)) return ev;
  ev.waiting_time = rng.exponential(total_);

  double target = rng.uniform() * total_;
  std::size_t i = 0;
  for (; i + 1 < n_; ++i) {
    if (target < row_sums_[i]) break;
    target -= row_sums_[i];
  }
  // Guard against round-off leaving us on an empty row.
  while (row_sums_[i] <= 0.0 && i > 0) --i;
  double t2 = rng.uniform() * row_sums_[i];
  std::size_t j = 0;
  std::size_t last_nonzero = 0;
  for (; j < n_; ++j) {
    const double r = rates_[i * n_ + j];
    if (r > 0.0) last_nonzero = j;
    if (t2 < r) break;
    t2 -= r;
  }
  if (j == n_) j = last_nonzero;
  ev.i = i;
  ev.j = j;
  ev.p = sample_exchanged_momentum(state_.velocities[j] - state_.velocities[i], kernel_, rng);
  return ev;
}

void JumpSimulator::commit(const JumpEvent& ev) {
  apply_collision(state_, ev.i, ev.j, ev.p);
  state_.time += ev.waiting_time;
  refresh_row(ev.i);
  refresh_row(ev.j);
  ++events_;
  // Full resummation keeps the incremental totals free of drift.
  resum();
}

std::pair<SystemState, double> step_jump(const SystemState& state, const KernelConfig& kernel, Rng& rng) {
  JumpSimulator sim(state, kernel);
  const JumpEvent ev = sim.propose(rng);
  if (!std::isfinite(ev.waiting_time)) return {state, ev.waiting_time};
  sim.commit(ev);
  return {sim.state(), ev.waiting_time};
}

Trajectory run_jump(const SystemState& initial, const KernelConfig& kernel, double horizon,
                    double snapshot_interval, Rng& rng, bool keep_snapshots) {
  const std::vector<double> schedule = snapshot_schedule(horizon, snapshot_interval);
  JumpSimulator sim(initial, kernel);
  Trajectory traj;
  const double t0 = initial.time;

  auto emit = [&](double t) {
    SystemState snap = sim.state();
    snap.time = t;
    traj.diagnostics.record(snap);
    if (keep_snapshots) traj.snapshots.push_back(std::move(snap));
  };

  std::size_t next = 0;
  while (next < schedule.size()) {
    const JumpEvent ev = sim.propose(rng);
    const double t_event = sim.state().time + ev.waiting_time;
    while (next < schedule.size() && t0 + schedule[next] < t_event) emit(t0 + schedule[next++]);
    if (next == schedule.size()) break;
    sim.commit(ev);
  }
  traj.events = sim.events();
  return traj;
}

}  // namespace klandau
