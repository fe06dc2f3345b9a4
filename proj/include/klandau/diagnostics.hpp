#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "klandau/interaction.hpp"
#include "klandau/state.hpp"
#include "klandau/stats.hpp"
#include "klandau/test_function.hpp"
#include "klandau/trajectory.hpp"
#include "klandau/vec3.hpp"

namespace klandau {

/// Independent trajectories sharing n, dynamics and snapshot schedule.
/// runs[r][s] is run r at times[s].
struct EnsembleRun {
  std::size_t n = 0;
  InteractionConfig interaction;
  std::vector<double> times;
  std::vector<std::vector<SystemState>> runs;
  std::uint64_t master_seed = 0;

  std::size_t size() const { return runs.size(); }
  /// All particle velocities of all runs at snapshot s (exchangeable samples
  /// of the one-particle marginal).
  std::vector<Vec3> pooled(std::size_t s) const;
  void validate() const;
};

struct Moments {
  Vec3 momentum;
  double energy = 0.0;
  /// Centered empirical covariance (1/n) sum (v - mean)(v - mean)^T.
  Mat3 covariance;
};

Moments moments(const SystemState& state);

/// Kozachenko-Leonenko k-nearest-neighbour differential entropy (nats) of
/// 3D samples. Needs >= 100 samples; coincident samples throw
/// "degenerate sample set".
double entropy_estimate(std::span<const Vec3> samples, int k = 5);

/// Gaussian entropy (3/2) log(2 pi e T) of the Maxwellian with the samples'
/// mean and temperature.
double maxwellian_entropy(std::span<const Vec3> samples);

/// KS distance between the empirical speed distribution (about the sample
/// mean) and the Maxwell speed law of the fitted temperature.
double maxwellian_distance(std::span<const Vec3> samples);

/// Speed histogram about the sample mean, `bins` equal bins on [0, vmax].
std::vector<double> speed_histogram(std::span<const Vec3> samples, int bins, double vmax);

struct ChaosEstimate {
  double value = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

using SingleParticleObservable = std::function<double(const Vec3&)>;

/// E[phi(v1) psi(v2)] - E[phi(v1)] E[psi(v2)], pair mean over ordered i != j
/// within each run, then across runs. 95% percentile bootstrap over runs.
ChaosEstimate chaos_correlation(std::span<const SystemState> runs, const SingleParticleObservable& phi,
                                const SingleParticleObservable& psi, int bootstrap = 1000,
                                std::uint64_t seed = 12345);

/// Per-snapshot weak-form terms of one configuration for a j-particle test
/// function, averaged over disjoint j-tuples (or only the first tuple):
///   phi      = mean_tau phi(V_tau)
///   l_term   = mean_tau L_j^N phi(V_tau)
///   c_delta  = mean_tau (1/n) sum_{m not in tau} sum_{k in tau} (1 - chi_delta) T_km
///   cbar     = same with chi_delta
/// T_km is the symmetrized pair integrand
///   div a^N(w) . (grad_k phi(V) - grad_k phi(V^{k<->m})) + a^N(w) : (H_kk(V) + H_kk(V^{k<->m})) / 2
/// or, unsymmetrized, 2 div a^N(w) . grad_k phi + a^N(w) : H_kk.
struct WeakFormTerms {
  double phi = 0.0;
  double l_term = 0.0;
  std::vector<double> c_delta;
  std::vector<double> cbar_delta;
};

struct WeakFormOptions {
  bool symmetrized = true;
  bool all_tuples = true;
};

WeakFormTerms weak_form_terms(const SystemState& state, const TestFunction& phi, const InteractionConfig& cfg,
                              std::span<const double> deltas, const WeakFormOptions& opt = {});

struct WeakFormEstimate {
  double delta = 0.0;
  stats::MeanSe lhs;
  stats::MeanSe rhs_delta;
  stats::MeanSe remainder_delta;
  stats::MeanSe l_term;
  /// lhs - rhs_delta - remainder_delta - l_term per run, then averaged.
  stats::MeanSe closure;
  double closure_z = 0.0;
};

/// Weak form of the N-particle hierarchy over [times.front(), times.back()]:
/// lhs = E[phi](t) - E[phi](0), right-hand terms integrated by the trapezoid
/// rule on the snapshot grid. One estimate per delta.
std::vector<WeakFormEstimate> weak_form_residual(const EnsembleRun& ensemble, const TestFunction& phi,
                                                 std::span<const double> deltas, const WeakFormOptions& opt = {});

struct ExponentFit {
  double exponent = 0.0;
  double se = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

/// Weighted log-log fit of |value| against delta (sigma_log = se/|value|).
ExponentFit fit_remainder_exponent(std::span<const WeakFormEstimate> estimates);

/// f_1 entropy gap (fitted-Maxwellian entropy minus kNN estimate) per
/// snapshot, pooled over runs; sigma is the batch-spread standard error.
struct EntropyGapSeries {
  std::vector<double> gap;
  std::vector<double> sigma;
};

EntropyGapSeries entropy_gap_series(const EnsembleRun& ensemble, int batches = 4);

struct TrendTest {
  bool nonincreasing = false;
  double max_violation = 0.0;
};

/// Isotonic trend test: the series passes when every point lies within
/// `sigma_mult` standard errors of its nonincreasing least-squares fit.
TrendTest isotonic_trend_test(std::span<const double> series, std::span<const double> sigma, double sigma_mult = 3.0);

}  // namespace klandau
