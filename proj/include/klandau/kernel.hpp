#pragma once

#include <cstddef>
#include <string>

namespace klandau {

enum class KernelProfile { gaussian, constant };

KernelProfile parse_kernel_profile(const std::string& name);
std::string to_string(KernelProfile p);

/// Radial collision kernel w(|p|) and grazing parameter epsilon.
///
/// The Gaussian profile is normalized so that its transverse second moment
/// int_{R^2} |y|^2 w(|y|) d^2y equals 4; with that normalization the
/// epsilon -> 0 limit of the scaled jump generator is exactly div(B grad).
/// The constant profile (w = 1) exists for sampler tests only.
struct KernelConfig {
  KernelProfile profile = KernelProfile::gaussian;
  double epsilon = 1.0;
  int quadrature_order = 16;
  double degenerate_tolerance = 1e-12;
  std::size_t rejection_cap = 50'000'000;

  /// w(r) of the unscaled profile.
  double profile_value(double r) const;
  /// Kernel evaluated at an exchanged momentum of norm |p|: w(|p| / epsilon).
  double scaled_value(double p_norm) const { return profile_value(p_norm / epsilon); }
  /// sup_r w(r); the profiles are nonincreasing so this is w(0).
  double profile_max() const { return profile_value(0.0); }

  void validate() const;
};

}  // namespace klandau
