#pragma once

#include <string>
#include <vector>

#include "klandau/interaction.hpp"
#include "klandau/kernel.hpp"
#include "klandau/state.hpp"
#include "klandau/test_function.hpp"

namespace klandau {

/// (L^eps phi)(V) = (1/(2 n eps^4)) sum_{i != j} (1/|u_ij|) int_{S_ij}
///   [phi(.. v_i + p .. v_j - p ..) - phi(V)] w(|p|/eps) dS(p),   u_ij = v_j - v_i,
/// by deterministic sphere quadrature. Starting from kernel.quadrature_order,
/// the order doubles until two successive orders agree; exceeding the cap
/// throws with the last residual.
double jump_generator_apply(const TestFunction& phi, const SystemState& state, const KernelConfig& kernel,
                            double epsilon, int max_order = 512);

/// div(B grad phi) = sum_{k,l} B_kl : Hess_kl phi + b . grad phi for any
/// interaction config (including kappa and the mollifier).
double generator_apply(const TestFunction& phi, const SystemState& state, const InteractionConfig& cfg);

/// Limit operator of the grazing scaling: requires kappa = 0 and the
/// mollifier disabled. Coincident pairs throw "singular configuration".
double diffusion_generator_apply(const TestFunction& phi, const SystemState& state, const InteractionConfig& cfg);

struct GrazingRow {
  double epsilon = 0.0;
  double jump_value = 0.0;
  double diffusion_value = 0.0;
  double error = 0.0;
};

struct GrazingReport {
  std::string phi;
  std::vector<GrazingRow> rows;
  /// Least-squares slope of log(error) against log(epsilon); NaN when some
  /// error is exactly zero.
  double slope = 0.0;
  bool strictly_decreasing = false;
  /// Every error <= conservation_tolerance (conserved observables).
  bool conserved = false;
  bool order_ok = false;

  static constexpr double conservation_tolerance = 1e-8;
};

/// Compares L^eps phi with div(B grad phi) over a decreasing epsilon sweep
/// (at least 4 values) at a frozen configuration.
GrazingReport grazing_limit_study(const TestFunction& phi, const SystemState& state, const KernelConfig& kernel,
                                  const std::vector<double>& epsilons);

}  // namespace klandau
