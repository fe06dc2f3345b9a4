#include "klandau/diffusion.hpp"

#include <algorithm>
#include <cmath>

#include "klandau/error.hpp"

namespace klandau {
namespace {

inline std::size_t pair_index(std::size_t i, std::size_t j, std::size_t n) {
  // i < j, lexicographic
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

/// |w|^{-alpha} with the common exponents special-cased.
inline double inverse_power(double r, double r2, double alpha) {
  if (alpha == 1.0) return 1.0 / r;
  if (alpha == 0.0) return 1.0;
  if (alpha == -2.0) return r2;
  return std::pow(r, -alpha);
}

struct Sweep {
  std::vector<Vec3> drift;
  std::vector<Vec3> noise;  // unit-time noise, covariance 2 B^N
  double rate = 0.0;        // stability rate G
};

/// One pass over all ordered pairs, parallel over particles. Each particle's
/// sums run over partners in index order, so the output is independent of
/// the worker count.
Sweep sweep(const SystemState& state, const InteractionConfig& cfg, const NoiseDraws* draws, bool want_drift) {
  const std::size_t n = state.size();
  const auto& v = state.velocities;
  const double inv_n = 1.0 / static_cast<double>(n);
  const bool moll = cfg.enable_mollifier;
  const double r0 = moll ? cfg.mollifier_scale : 0.0;
  const Mollifier mollifier(moll ? cfg.mollifier_scale : 1.0);
  const double noise_scale = std::sqrt(2.0 * inv_n);
  const double kappa_scale = std::sqrt(2.0 * cfg.identity_weight);
  const bool particle_noise = draws != nullptr && cfg.identity_weight > 0.0;

  Sweep out;
  if (want_drift) out.drift.assign(n, Vec3{});
  if (draws) out.noise.assign(n, Vec3{});
  std::vector<double> rates(n, 0.0);
  int singular = 0;

  const long nn = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 4)
  for (long kk = 0; kk < nn; ++kk) {
    const auto k = static_cast<std::size_t>(kk);
    Vec3 b, eta;
    double g = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == k) continue;
      const Vec3 w = v[k] - v[j];
      const double r2 = norm2(w);
      const double r = std::sqrt(r2);
      double cb = 1.0;
      if (moll) {
        if (r <= r0) continue;
        if (r < 2.0 * r0) cb = mollifier.chi_bar(r);
      } else if (r == 0.0) {
#pragma omp atomic write
        singular = 1;
        continue;
      }
      const double coef = cb * inverse_power(r, r2, cfg.alpha);
      const double c_over_r2 = coef / r2;
      g += c_over_r2;
      if (want_drift) b -= c_over_r2 * w;
      if (draws) {
        const std::size_t idx = k < j ? pair_index(k, j, n) : pair_index(j, k, n);
        const Vec3 z{draws->pair[3 * idx], draws->pair[3 * idx + 1], draws->pair[3 * idx + 2]};
        const double s = (k < j ? 1.0 : -1.0) * std::sqrt(coef);
        eta += s * (z - (dot(w, z) / r2) * w);
      }
    }
    if (want_drift) out.drift[k] = (4.0 * inv_n) * b;
    if (draws) {
      eta *= noise_scale;
      if (particle_noise)
        eta += kappa_scale * Vec3{draws->particle[3 * k], draws->particle[3 * k + 1], draws->particle[3 * k + 2]};
      out.noise[k] = eta;
    }
    rates[k] = 4.0 * inv_n * g;
  }
  if (singular) throw Error("singular configuration: coincident velocities with mollifier disabled");
  out.rate = n ? *std::max_element(rates.begin(), rates.end()) : 0.0;
  return out;
}

void check_finite(const SystemState& s) {
  for (const Vec3& v : s.velocities)
    if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z)) throw Error("blow-up: reduce dt");
}

}  // namespace

void DiffusionConfig::validate() const {
  interaction.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error("dt must be > 0");
  if (!(stability_safety > 0.0 && stability_safety <= 1.0)) throw Error("stability_safety must be in (0, 1]");
}

std::vector<Vec3> drift(const SystemState& state, const InteractionConfig& cfg) {
  return sweep(state, cfg, nullptr, true).drift;
}

NoiseDraws NoiseDraws::draw(std::size_t n, bool with_particle_noise, Rng& rng) {
  NoiseDraws d;
  d.pair.resize(3 * (n * (n - 1) / 2));
  for (double& z : d.pair) z = rng.normal();
  if (with_particle_noise) {
    d.particle.resize(3 * n);
    for (double& z : d.particle) z = rng.normal();
  }
  return d;
}

std::vector<Vec3> noise_from_draws(const SystemState& state, const InteractionConfig& cfg, double dt,
                                   const NoiseDraws& draws) {
  std::vector<Vec3> eta = sweep(state, cfg, &draws, false).noise;
  const double sdt = std::sqrt(dt);
  for (Vec3& e : eta) e *= sdt;
  return eta;
}

std::vector<Vec3> noise_increments(const SystemState& state, const InteractionConfig& cfg, double dt, Rng& rng) {
  const NoiseDraws draws = NoiseDraws::draw(state.size(), cfg.identity_weight > 0.0, rng);
  return noise_from_draws(state, cfg, dt, draws);
}

double stability_rate(const SystemState& state, const InteractionConfig& cfg) {
  return sweep(state, cfg, nullptr, false).rate;
}

namespace {

SystemState advance(const SystemState& state, const Sweep& sw, double h) {
  SystemState next = state;
  const double sh = std::sqrt(h);
  for (std::size_t k = 0; k < next.size(); ++k) next.velocities[k] += h * sw.drift[k] + sh * sw.noise[k];
  next.time = state.time + h;
  check_finite(next);
  return next;
}

}  // namespace

SystemState step_euler_maruyama(const SystemState& state, const DiffusionConfig& cfg, double dt, Rng& rng) {
  if (dt == 0.0) return state;
  if (!(dt > 0.0)) throw Error("dt must be >= 0");
  const NoiseDraws draws = NoiseDraws::draw(state.size(), cfg.interaction.identity_weight > 0.0, rng);
  const Sweep sw = sweep(state, cfg.interaction, &draws, true);
  if (cfg.guard_enabled && dt * sw.rate > cfg.stability_safety)
    throw Error("dt violates the stability guard (dt * G = " + std::to_string(dt * sw.rate) + ")");
  return advance(state, sw, dt);
}

Trajectory run_diffusion(const SystemState& initial, const DiffusionConfig& cfg, double horizon,
                         double snapshot_interval, Rng& rng, bool keep_snapshots) {
  cfg.validate();
  initial.validate(/*allow_single=*/true);
  const std::vector<double> schedule = snapshot_schedule(horizon, snapshot_interval);
  Trajectory traj;
  SystemState state = initial;
  const double t0 = initial.time;
  const bool particle_noise = cfg.interaction.identity_weight > 0.0;

  auto emit = [&](double t) {
    SystemState snap = state;
    snap.time = t;
    traj.diagnostics.record(snap);
    if (keep_snapshots) traj.snapshots.push_back(std::move(snap));
  };

  emit(t0);
  double elapsed = 0.0;
  for (std::size_t next = 1; next < schedule.size(); ++next) {
    const double target = schedule[next];
    while (target - elapsed > 1e-12 * std::max(1.0, target)) {
      const NoiseDraws draws = NoiseDraws::draw(state.size(), particle_noise, rng);
      const Sweep sw = sweep(state, cfg.interaction, &draws, true);
      double h = std::min(cfg.dt, target - elapsed);
      if (cfg.guard_enabled && sw.rate > 0.0) h = std::min(h, cfg.stability_safety / sw.rate);
      state = advance(state, sw, h);
      elapsed += h;
      ++traj.events;
    }
    elapsed = target;
    state.time = t0 + target;
    emit(t0 + target);
  }
  return traj;
}

}  // namespace klandau
