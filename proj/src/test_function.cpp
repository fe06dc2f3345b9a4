#include "klandau/test_function.hpp"

#include <cmath>

#include "klandau/error.hpp"

namespace klandau {
namespace {

void check_dim(int j, std::size_t size, std::size_t expected, const char* what) {
  if (j < 1 || j > TestFunction::kMaxParticles) throw Error("test functions support 1..4 particles");
  if (size != expected) throw Error(std::string("test function ") + what + " has wrong size");
}

}  // namespace

Mat3 TestFunction::Eval::hess_block(int k, int l) const {
  Mat3 m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = hess[(3 * k + r) * kMaxDim + 3 * l + c];
  return m;
}

TestFunction TestFunction::polynomial(std::string name, int j, double c0, std::vector<double> g,
                                      std::vector<double> q, double c4, std::vector<double> metric,
                                      std::vector<double> center) {
  const auto d = static_cast<std::size_t>(3 * j);
  if (g.empty()) g.assign(d, 0.0);
  if (q.empty()) q.assign(d * d, 0.0);
  if (metric.empty()) metric.assign(d, 1.0);
  if (center.empty()) center.assign(d, 0.0);
  check_dim(j, g.size(), d, "gradient");
  check_dim(j, q.size(), d * d, "quadratic form");
  check_dim(j, metric.size(), d, "metric");
  check_dim(j, center.size(), d, "center");
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < a; ++b)
      if (q[a * d + b] != q[b * d + a]) throw Error("polynomial quadratic form must be symmetric");
  TestFunction f;
  f.name_ = std::move(name);
  f.family_ = Family::polynomial;
  f.j_ = j;
  f.c0_ = c0;
  f.c4_ = c4;
  f.g_ = std::move(g);
  f.q_ = std::move(q);
  f.metric_ = std::move(metric);
  f.center_ = std::move(center);
  return f;
}

TestFunction TestFunction::energy(int j) {
  const auto d = static_cast<std::size_t>(3 * j);
  std::vector<double> q(d * d, 0.0);
  for (std::size_t a = 0; a < d; ++a) q[a * d + a] = 2.0;
  return polynomial("energy", j, 0.0, {}, std::move(q));
}

TestFunction TestFunction::momentum(int j, const Vec3& e) {
  std::vector<double> g(static_cast<std::size_t>(3 * j));
  for (int k = 0; k < j; ++k)
    for (int a = 0; a < 3; ++a) g[3 * k + a] = e[a];
  return polynomial("momentum", j, 0.0, std::move(g), {});
}

TestFunction TestFunction::coordinate(int j, int particle, int axis) {
  if (particle < 0 || particle >= j || axis < 0 || axis > 2) throw Error("coordinate index out of range");
  std::vector<double> g(static_cast<std::size_t>(3 * j), 0.0);
  g[3 * particle + axis] = 1.0;
  return polynomial("coordinate", j, 0.0, std::move(g), {});
}

TestFunction TestFunction::gaussian_bump(std::string name, int j, std::vector<double> center,
                                         std::vector<double> metric, double amplitude) {
  const auto d = static_cast<std::size_t>(3 * j);
  check_dim(j, center.size(), d, "center");
  check_dim(j, metric.size(), d, "metric");
  TestFunction f;
  f.name_ = std::move(name);
  f.family_ = Family::gaussian_bump;
  f.j_ = j;
  f.amplitude_ = amplitude;
  f.center_ = std::move(center);
  f.metric_ = std::move(metric);
  return f;
}

TestFunction TestFunction::compact_bump(std::string name, int j, std::vector<double> center,
                                        std::vector<double> metric, double amplitude) {
  TestFunction f = gaussian_bump(std::move(name), j, std::move(center), std::move(metric), amplitude);
  f.family_ = Family::compact_bump;
  return f;
}

double TestFunction::value(std::span<const double> x) const {
  const int d = dim();
  double s = 0.0;
  for (int a = 0; a < d; ++a) {
    const double t = x[a] - center_[a];
    s += metric_[a] * t * t;
  }
  switch (family_) {
    case Family::polynomial: {
      double v = c0_ + c4_ * s * s;
      for (int a = 0; a < d; ++a) {
        double qa = 0.0;
        for (int b = 0; b < d; ++b) qa += q_[a * d + b] * x[b];
        v += g_[a] * x[a] + 0.5 * x[a] * qa;
      }
      return v;
    }
    case Family::gaussian_bump:
      return amplitude_ * std::exp(-0.5 * s);
    case Family::compact_bump:
      return s < 1.0 ? amplitude_ * std::exp(1.0 - 1.0 / (1.0 - s)) : 0.0;
  }
  return 0.0;
}

void TestFunction::evaluate(std::span<const double> x, Eval& out) const {
  constexpr int S = kMaxDim;
  const int d = dim();
  std::array<double, S> md{};  // m_a (x_a - c_a)
  double s = 0.0;
  for (int a = 0; a < d; ++a) {
    const double t = x[a] - center_[a];
    md[a] = metric_[a] * t;
    s += metric_[a] * t * t;
  }
  out.grad.fill(0.0);
  out.hess.fill(0.0);

  switch (family_) {
    case Family::polynomial: {
      out.value = c0_ + c4_ * s * s;
      for (int a = 0; a < d; ++a) {
        double qa = 0.0;
        for (int b = 0; b < d; ++b) qa += q_[a * d + b] * x[b];
        out.value += g_[a] * x[a] + 0.5 * x[a] * qa;
        out.grad[a] = g_[a] + qa + 4.0 * c4_ * s * md[a];
        for (int b = 0; b < d; ++b)
          out.hess[a * S + b] = q_[a * d + b] + 8.0 * c4_ * md[a] * md[b] + (a == b ? 4.0 * c4_ * s * metric_[a] : 0.0);
      }
      return;
    }
    case Family::gaussian_bump: {
      const double e = amplitude_ * std::exp(-0.5 * s);
      out.value = e;
      for (int a = 0; a < d; ++a) {
        out.grad[a] = -e * md[a];
        for (int b = 0; b < d; ++b) out.hess[a * S + b] = e * (md[a] * md[b] - (a == b ? metric_[a] : 0.0));
      }
      return;
    }
    case Family::compact_bump: {
      if (s >= 1.0) {
        out.value = 0.0;
        return;
      }
      const double u = 1.0 / (1.0 - s);
      const double v = amplitude_ * std::exp(1.0 - u);
      const double h1 = -u * u;          // dh/ds
      const double h2 = -2.0 * u * u * u;  // d2h/ds2
      out.value = v;
      for (int a = 0; a < d; ++a) {
        const double sa = 2.0 * md[a];
        out.grad[a] = v * h1 * sa;
        for (int b = 0; b < d; ++b) {
          const double sb = 2.0 * md[b];
          out.hess[a * S + b] = v * ((h1 * h1 + h2) * sa * sb + (a == b ? 2.0 * h1 * metric_[a] : 0.0));
        }
      }
      return;
    }
  }
}

}  // namespace klandau
