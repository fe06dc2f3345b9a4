#include "klandau/interaction.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "klandau/error.hpp"

namespace klandau {

Mollifier::Mollifier(double delta) : delta_(delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw Error("mollifier scale must be positive");
}

double Mollifier::chi_bar(double r) const {
  if (r <= delta_) return 0.0;
  if (r >= 2.0 * delta_) return 1.0;
  const double s = (r - delta_) / delta_;
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double Mollifier::chi(double r) const { return 1.0 - chi_bar(r); }

double Mollifier::chi_bar_derivative(double r) const {
  if (r <= delta_ || r >= 2.0 * delta_) return 0.0;
  const double s = (r - delta_) / delta_;
  const double t = s * (1.0 - s);
  return 30.0 * t * t / delta_;
}

InteractionConfig InteractionConfig::for_particles(std::size_t n, double alpha) {
  InteractionConfig cfg;
  cfg.alpha = alpha;
  cfg.mollifier_scale = 1.0 / static_cast<double>(n);
  cfg.identity_weight = 1.0 / static_cast<double>(n);
  return cfg;
}

void InteractionConfig::validate() const {
  if (!(alpha < 2.0)) throw Error("alpha must be < 2");
  if (enable_mollifier && !(mollifier_scale > 0.0)) throw Error("mollifier_scale must be > 0");
  if (!(identity_weight >= 0.0) || !std::isfinite(identity_weight))
    throw Error("identity_weight must be >= 0");
}

Mat3 projection_matrix(const Vec3& w) {
  const double w2 = norm2(w);
  if (!(w2 > 0.0)) throw Error("degenerate direction");
  Mat3 p = Mat3::identity();
  p -= (1.0 / w2) * outer(w, w);
  return p;
}

double pair_coefficient(double r, const InteractionConfig& cfg) {
  if (cfg.enable_mollifier) {
    const double cb = Mollifier(cfg.mollifier_scale).chi_bar(r);
    if (cb == 0.0) return 0.0;
    return cb * std::pow(r, -cfg.alpha);
  }
  if (!(r > 0.0)) throw Error("singular configuration: coincident velocities with mollifier disabled");
  return std::pow(r, -cfg.alpha);
}

Mat3 pair_matrix(const Vec3& w, const InteractionConfig& cfg) {
  const double c = pair_coefficient(norm(w), cfg);
  if (c == 0.0) return Mat3{};
  return c * projection_matrix(w);
}

Eigen::MatrixXd assemble_B(const SystemState& state, const InteractionConfig& cfg, std::size_t limit) {
  const std::size_t n = state.size();
  if (n > limit) throw Error("dense assembly too large (n = " + std::to_string(n) + ")");
  const double inv_n = 1.0 / static_cast<double>(n);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Mat3 a = pair_matrix(state.velocities[i] - state.velocities[j], cfg);
      for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t c = 0; c < 3; ++c) {
          const double v = inv_n * a(r, c);
          b(3 * i + r, 3 * j + c) = -v;
          b(3 * j + r, 3 * i + c) = -v;
          b(3 * i + r, 3 * i + c) += v;
          b(3 * j + r, 3 * j + c) += v;
        }
      }
    }
    for (std::size_t r = 0; r < 3; ++r) b(3 * i + r, 3 * i + r) += cfg.identity_weight;
  }
  return b;
}

double quadratic_form(const SystemState& state, const InteractionConfig& cfg, std::span<const double> xi) {
  const std::size_t n = state.size();
  if (xi.size() != 3 * n) throw Error("xi must have 3n entries");
  const Mollifier moll(cfg.enable_mollifier ? cfg.mollifier_scale : 1.0);
  const auto& v = state.velocities;
  std::vector<double> row(n, 0.0);
  int singular = 0;

  // row[i] = sum_{j>i} chibar |w|^-alpha |P(w)(xi_i - xi_j)|^2
  const long nn = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 8)
  for (long ii = 0; ii < nn; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const Vec3 xi_i{xi[3 * i], xi[3 * i + 1], xi[3 * i + 2]};
    double acc = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec3 w = v[i] - v[j];
      const double r2 = norm2(w);
      const double r = std::sqrt(r2);
      double c;
      if (cfg.enable_mollifier) {
        const double cb = moll.chi_bar(r);
        if (cb == 0.0) continue;
        c = cb * std::pow(r, -cfg.alpha);
      } else if (r == 0.0) {
#pragma omp atomic write
        singular = 1;
        continue;
      } else {
        c = std::pow(r, -cfg.alpha);
      }
      const Vec3 d = xi_i - Vec3{xi[3 * j], xi[3 * j + 1], xi[3 * j + 2]};
      // |P d|^2 = |d|^2 - (w.d)^2/|w|^2
      const double wd = dot(w, d);
      acc += c * (norm2(d) - wd * wd / r2);
    }
    row[i] = acc;
  }

  if (singular) throw Error("singular configuration: coincident velocities with mollifier disabled");
  double pair_sum = 0.0;
  for (double r : row) pair_sum += r;
  double xi2 = 0.0;
  for (double x : xi) xi2 += x * x;
  return pair_sum / static_cast<double>(n) + cfg.identity_weight * xi2;
}

}  // namespace klandau
