#include "klandau/kernel.hpp"

#include <cmath>
#include <numbers>

#include "klandau/error.hpp"

namespace klandau {

KernelProfile parse_kernel_profile(const std::string& name) {
  if (name == "gaussian") return KernelProfile::gaussian;
  if (name == "constant") return KernelProfile::constant;
  throw Error("unknown kernel profile '" + name + "'");
}

std::string to_string(KernelProfile p) {
  return p == KernelProfile::gaussian ? "gaussian" : "constant";
}

double KernelConfig::profile_value(double r) const {
  switch (profile) {
    case KernelProfile::gaussian:
      // amplitude 1/pi gives int_{R^2} |y|^2 w d^2y = 4
      return std::exp(-0.5 * r * r) / std::numbers::pi;
    case KernelProfile::constant:
      return 1.0;
  }
  return 0.0;
}

void KernelConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw Error("epsilon must be > 0");
  if (epsilon > 1.0) throw Error("epsilon must be <= 1");
  if (quadrature_order < 2 || quadrature_order > 512) throw Error("quadrature_order must be in [2, 512]");
  if (!(degenerate_tolerance >= 0.0)) throw Error("degenerate tolerance must be >= 0");
  if (rejection_cap == 0) throw Error("rejection cap must be positive");
}

}  // namespace klandau
