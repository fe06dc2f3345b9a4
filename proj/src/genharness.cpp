#include "klandau/genharness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "klandau/diffusion.hpp"
#include "klandau/error.hpp"
#include "klandau/jump.hpp"
#include "klandau/sphere_quadrature.hpp"
#include "klandau/stats.hpp"

namespace klandau {
namespace {

void require_support(const TestFunction& phi, const SystemState& state) {
  if (static_cast<std::size_t>(phi.particles()) > state.size())
    throw Error("test function uses more particles than the state has");
}

}  // namespace

double jump_generator_apply(const TestFunction& phi, const SystemState& state, const KernelConfig& kernel,
                            double epsilon, int max_order) {
  require_support(phi, state);
  KernelConfig k = kernel;
  k.epsilon = epsilon;
  k.validate();
  const std::size_t n = state.size();
  const auto jphi = static_cast<std::size_t>(phi.particles());
  const double eps2 = epsilon * epsilon;
  const double prefactor = 1.0 / (2.0 * static_cast<double>(n) * eps2 * eps2);

  std::vector<double> x(3 * jphi);
  for (std::size_t a = 0; a < jphi; ++a)
    for (int c = 0; c < 3; ++c) x[3 * a + c] = state.velocities[a][c];
  const double phi0 = phi.value(x);

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || (i >= jphi && j >= jphi)) continue;
      const Vec3 u = state.velocities[j] - state.velocities[i];
      const double u_norm = norm(u);
      if (u_norm <= k.degenerate_tolerance) throw Error("pair separation below tolerance");
      SpherePanelRule rule;
      rule.center = 0.5 * u;
      rule.radius = 0.5 * u_norm;
      rule.pole = (-1.0 / u_norm) * u;
      rule.first_panel = std::min(std::numbers::pi, epsilon / rule.radius);

      std::vector<double> xp = x;
      auto integrand = [&](const Vec3& p) {
        for (int c = 0; c < 3; ++c) {
          if (i < jphi) xp[3 * i + c] = x[3 * i + c] + p[c];
          if (j < jphi) xp[3 * j + c] = x[3 * j + c] - p[c];
        }
        return k.scaled_value(norm(p)) * (phi.value(xp) - phi0);
      };

      const double scale = prefactor / u_norm;
      int order = k.quadrature_order;
      rule.order = order;
      double coarse = scale * rule.integrate(integrand);
      double residual = 0.0;
      for (;;) {
        if (2 * order > max_order) {
          std::ostringstream msg;
          msg << "sphere quadrature did not converge (residual " << residual << " at order " << order << ")";
          throw Error(msg.str());
        }
        order *= 2;
        rule.order = order;
        const double fine = scale * rule.integrate(integrand);
        residual = std::abs(fine - coarse);
        coarse = fine;
        if (residual <= 1e-11 + 1e-11 * std::abs(fine)) break;
      }
      total += coarse;
    }
  }
  return total;
}

double generator_apply(const TestFunction& phi, const SystemState& state, const InteractionConfig& cfg) {
  require_support(phi, state);
  const std::size_t n = state.size();
  const int jphi = phi.particles();
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<double> x(3 * jphi);
  for (int a = 0; a < jphi; ++a)
    for (int c = 0; c < 3; ++c) x[3 * a + c] = state.velocities[a][c];
  TestFunction::Eval ev;
  phi.evaluate(x, ev);

  const std::vector<Vec3> b = drift(state, cfg);
  double total = 0.0;
  for (int k = 0; k < jphi; ++k) {
    total += dot(b[k], ev.grad_block(k));
    Mat3 bkk = cfg.identity_weight * Mat3::identity();
    for (std::size_t m = 0; m < n; ++m) {
      if (m == static_cast<std::size_t>(k)) continue;
      bkk += inv_n * pair_matrix(state.velocities[k] - state.velocities[m], cfg);
    }
    total += contract(bkk, ev.hess_block(k, k));
    for (int l = 0; l < jphi; ++l) {
      if (l == k) continue;
      total -= inv_n * contract(pair_matrix(state.velocities[k] - state.velocities[l], cfg), ev.hess_block(k, l));
    }
  }
  return total;
}

double diffusion_generator_apply(const TestFunction& phi, const SystemState& state, const InteractionConfig& cfg) {
  if (cfg.identity_weight != 0.0 || cfg.enable_mollifier)
    throw Error("the limit generator needs identity_weight = 0 and the mollifier disabled");
  return generator_apply(phi, state, cfg);
}

GrazingReport grazing_limit_study(const TestFunction& phi, const SystemState& state, const KernelConfig& kernel,
                                  const std::vector<double>& epsilons) {
  if (epsilons.size() < 4) throw Error("grazing study needs at least 4 epsilon values");
  for (std::size_t i = 1; i < epsilons.size(); ++i)
    if (!(epsilons[i] < epsilons[i - 1])) throw Error("epsilon list must be strictly decreasing");

  InteractionConfig limit;
  limit.alpha = 1.0;
  limit.enable_mollifier = false;
  limit.identity_weight = 0.0;
  const double reference = diffusion_generator_apply(phi, state, limit);

  GrazingReport report;
  report.phi = phi.name();
  std::vector<double> log_eps, log_err;
  bool positive = true;
  for (double eps : epsilons) {
    GrazingRow row;
    row.epsilon = eps;
    row.jump_value = jump_generator_apply(phi, state, kernel, eps);
    row.diffusion_value = reference;
    row.error = std::abs(row.jump_value - reference);
    report.rows.push_back(row);
    if (row.error > 0.0) {
      log_eps.push_back(std::log(eps));
      log_err.push_back(std::log(row.error));
    } else {
      positive = false;
    }
  }
  report.conserved = std::all_of(report.rows.begin(), report.rows.end(), [](const GrazingRow& r) {
    return r.error <= GrazingReport::conservation_tolerance;
  });
  report.strictly_decreasing = true;
  for (std::size_t i = 1; i < report.rows.size(); ++i)
    if (!(report.rows[i].error < report.rows[i - 1].error)) report.strictly_decreasing = false;
  report.slope = positive ? stats::linear_fit(log_eps, log_err).slope : std::nan("");
  report.order_ok = report.conserved || (report.strictly_decreasing && report.slope >= 1.0);
  return report;
}

}  // namespace klandau
