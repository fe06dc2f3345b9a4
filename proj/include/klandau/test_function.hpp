#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "klandau/vec3.hpp"

namespace klandau {

/// Smooth observable of the first j <= 4 particle velocities with exact
/// value, gradient and Hessian. Coordinates are particle-major:
/// x = (v_1x, v_1y, v_1z, v_2x, ...).
class TestFunction {
 public:
  static constexpr int kMaxParticles = 4;
  static constexpr int kMaxDim = 3 * kMaxParticles;

  enum class Family { polynomial, gaussian_bump, compact_bump };

  struct Eval {
    double value = 0.0;
    std::array<double, kMaxDim> grad{};
    std::array<double, kMaxDim * kMaxDim> hess{};  // row-major, stride kMaxDim

    Vec3 grad_block(int k) const { return {grad[3 * k], grad[3 * k + 1], grad[3 * k + 2]}; }
    Mat3 hess_block(int k, int l) const;
  };

  /// Sum of |v_i|^2 over the first j particles.
  static TestFunction energy(int j);
  /// Sum of v_i . e over the first j particles.
  static TestFunction momentum(int j, const Vec3& e);
  /// One velocity component of one particle.
  static TestFunction coordinate(int j, int particle, int axis);
  /// c0 + g.x + x^T Q x / 2 + c4 (sum_i m_i (x_i - x0_i)^2)^2.
  static TestFunction polynomial(std::string name, int j, double c0, std::vector<double> g, std::vector<double> q,
                                 double c4 = 0.0, std::vector<double> metric = {},
                                 std::vector<double> center = {});
  /// A exp(-s/2), s = sum_i m_i (x_i - c_i)^2.
  static TestFunction gaussian_bump(std::string name, int j, std::vector<double> center, std::vector<double> metric,
                                    double amplitude = 1.0);
  /// A exp(1 - 1/(1 - s)) for s < 1, zero otherwise (C-infinity, compact support).
  static TestFunction compact_bump(std::string name, int j, std::vector<double> center, std::vector<double> metric,
                                   double amplitude = 1.0);

  const std::string& name() const { return name_; }
  Family family() const { return family_; }
  int particles() const { return j_; }
  int dim() const { return 3 * j_; }

  double value(std::span<const double> x) const;
  void evaluate(std::span<const double> x, Eval& out) const;

 private:
  TestFunction() = default;

  std::string name_;
  Family family_ = Family::polynomial;
  int j_ = 1;
  double c0_ = 0.0;
  double c4_ = 0.0;
  double amplitude_ = 1.0;
  std::vector<double> g_, q_, metric_, center_;
};

}  // namespace klandau
