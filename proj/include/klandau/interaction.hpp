#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "klandau/state.hpp"
#include "klandau/vec3.hpp"

namespace klandau {

/// Smooth cutoff chi_delta: 1 below delta, 0 above 2*delta, quintic
/// smoothstep in between (C^2 at both knots).
class Mollifier {
 public:
  explicit Mollifier(double delta);

  double delta() const { return delta_; }
  double chi(double r) const;
  /// 1 - chi(r).
  double chi_bar(double r) const;
  /// d/dr chi_bar(r).
  double chi_bar_derivative(double r) const;

 private:
  double delta_;
};

struct InteractionConfig {
  double alpha = 1.0;
  double mollifier_scale = 0.0;
  double identity_weight = 0.0;
  bool enable_mollifier = true;

  /// Default regularization for n particles: r0 = kappa = 1/n, Coulomb exponent.
  static InteractionConfig for_particles(std::size_t n, double alpha = 1.0);

  /// Throws klandau::Error naming the offending field.
  void validate() const;
};

/// P(w) = I - w w^T / |w|^2. Throws on a zero vector.
Mat3 projection_matrix(const Vec3& w);

/// Scalar prefactor chibar(r) r^{-alpha} of the mollified pair matrix.
/// With the mollifier disabled and r == 0 throws "singular configuration".
double pair_coefficient(double r, const InteractionConfig& cfg);

/// a^N(w) = chibar(|w|) |w|^{-alpha} P(w); zero inside the mollifier core.
Mat3 pair_matrix(const Vec3& w, const InteractionConfig& cfg);

inline constexpr std::size_t kDenseAssemblyLimit = 128;

/// Dense 3n x 3n matrix B^N. Test-scale only.
Eigen::MatrixXd assemble_B(const SystemState& state, const InteractionConfig& cfg,
                           std::size_t limit = kDenseAssemblyLimit);

/// xi^T B^N xi evaluated pairwise in O(n^2) without assembling B^N:
///   (1/n) sum_{i<j} |P_ij (xi_i - xi_j)|^2 chibar_ij / |v_i - v_j|^alpha + kappa |xi|^2.
/// Row partial sums are computed in parallel and reduced in row order, so the
/// result does not depend on the worker count.
double quadratic_form(const SystemState& state, const InteractionConfig& cfg,
                      std::span<const double> xi);

}  // namespace klandau
