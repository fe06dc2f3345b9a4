#include "doctest.h"
#include "helpers.hpp"
#include "klandau/diffusion.hpp"
#include "klandau/error.hpp"
#include "klandau/genharness.hpp"
#include "klandau/test_function.hpp"

using namespace klandau;
using testing::random_state;

namespace {

std::vector<TestFunction> families(int j, Rng& rng) {
  const auto d = static_cast<std::size_t>(3 * j);
  std::vector<double> g(d), q(d * d), c(d), m(d);
  for (auto& x : g) x = rng.normal();
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b <= a; ++b) q[a * d + b] = q[b * d + a] = rng.normal();
  for (auto& x : c) x = 0.3 * rng.normal();
  for (auto& x : m) x = 0.05 + 0.2 * rng.uniform();
  return {TestFunction::polynomial("poly", j, 0.7, g, q, 0.1, m, c), TestFunction::gaussian_bump("gauss", j, c, m, 1.3),
          TestFunction::compact_bump("compact", j, c, m, 0.8), TestFunction::energy(j),
          TestFunction::momentum(j, {0.2, -1, 0.5})};
}

// div(B grad phi) by central differences of the flux B(V) grad phi(V).
double fd_generator(const TestFunction& phi, const SystemState& s, const InteractionConfig& cfg, double h) {
  const std::size_t d = 3 * s.size();
  auto flux = [&](const SystemState& x, std::size_t c) {
    TestFunction::Eval ev;
    phi.evaluate(x.flat().subspan(0, static_cast<std::size_t>(phi.dim())), ev);
    const Eigen::MatrixXd b = assemble_B(x, cfg);
    double f = 0.0;
    for (int l = 0; l < phi.dim(); ++l) f += b(static_cast<Eigen::Index>(c), l) * ev.grad[l];
    return f;
  };
  double div = 0.0;
  for (std::size_t c = 0; c < d; ++c) {
    SystemState p = s, m = s;
    p.flat()[c] += h;
    m.flat()[c] -= h;
    div += (flux(p, c) - flux(m, c)) / (2 * h);
  }
  return div;
}

}  // namespace

TEST_CASE("test function derivatives match finite differences") {
  Rng rng(40);
  for (int j = 1; j <= 3; ++j) {
    for (const TestFunction& f : families(j, rng)) {
      const int d = f.dim();
      std::vector<double> x(d);
      for (auto& v : x) v = 0.5 * rng.normal();
      TestFunction::Eval ev;
      f.evaluate(x, ev);
      CHECK(ev.value == doctest::Approx(f.value(x)).epsilon(1e-14));
      const double h = 1e-5;
      for (int a = 0; a < d; ++a) {
        auto xp = x, xm = x;
        xp[a] += h;
        xm[a] -= h;
        const double g = (f.value(xp) - f.value(xm)) / (2 * h);
        CHECK(std::abs(ev.grad[a] - g) <= 1e-6 * std::max(1.0, std::abs(g)));
        TestFunction::Eval ep, em;
        f.evaluate(xp, ep);
        f.evaluate(xm, em);
        for (int b = 0; b < d; ++b) {
          const double hab = (ep.grad[b] - em.grad[b]) / (2 * h);
          CHECK(std::abs(ev.hess[a * TestFunction::kMaxDim + b] - hab) <= 1e-6 * std::max(1.0, std::abs(hab)));
        }
      }
    }
  }
  CHECK_THROWS_AS(TestFunction::energy(5), Error);
}

TEST_CASE("compact bump vanishes outside its support") {
  const auto f = TestFunction::compact_bump("b", 1, {0, 0, 0}, {1, 1, 1});
  CHECK(f.value(std::vector<double>{1.0, 0.1, 0.0}) == 0.0);
  CHECK(f.value(std::vector<double>{0.0, 0.0, 0.0}) == 1.0);
}

TEST_CASE("diffusion generator") {
  Rng rng(41);
  InteractionConfig bare = InteractionConfig::for_particles(4);
  bare.identity_weight = 0.0;
  bare.enable_mollifier = false;

  SUBCASE("linear test function returns b . grad phi") {
    const SystemState s = random_state(4, rng);
    const auto phi = TestFunction::coordinate(3, 2, 1);
    const auto b = drift(s, bare);
    CHECK(diffusion_generator_apply(phi, s, bare) == doctest::Approx(b[2].y).epsilon(1e-13));
  }
  SUBCASE("energy is annihilated") {
    const SystemState s = random_state(4, rng);
    CHECK(std::abs(diffusion_generator_apply(TestFunction::energy(4), s, bare)) <= 1e-12);
    CHECK(std::abs(diffusion_generator_apply(TestFunction::momentum(4, {1, 2, 3}), s, bare)) <= 1e-12);
  }
  SUBCASE("requires the bare operator") {
    const SystemState s = random_state(4, rng);
    CHECK_THROWS_AS(diffusion_generator_apply(TestFunction::energy(2), s, InteractionConfig::for_particles(4)), Error);
    SystemState coincident = s;
    coincident.velocities[1] = coincident.velocities[0];
    CHECK_THROWS_WITH_AS(diffusion_generator_apply(TestFunction::energy(2), coincident, bare),
                         doctest::Contains("singular configuration"), Error);
  }
  SUBCASE("finite-difference generator oracle") {
    for (std::size_t n : {2u, 3u, 5u, 8u}) {
      InteractionConfig cfg = InteractionConfig::for_particles(n);
      cfg.mollifier_scale = 0.3;
      InteractionConfig b0 = cfg;
      b0.identity_weight = 0.0;
      b0.enable_mollifier = false;
      const SystemState s = random_state(n, rng);
      const int j = static_cast<int>(std::min<std::size_t>(n, 3));
      for (const TestFunction& f : families(j, rng)) {
        const double fd = fd_generator(f, s, cfg, 1e-5);
        CHECK(std::abs(generator_apply(f, s, cfg) - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
        const double fd0 = fd_generator(f, s, b0, 1e-5);
        CHECK(std::abs(diffusion_generator_apply(f, s, b0) - fd0) <= 1e-6 * std::max(1.0, std::abs(fd0)));
      }
    }
  }
}

TEST_CASE("jump generator") {
  Rng rng(42);
  const SystemState s = random_state(3, rng);
  KernelConfig k;
  for (double eps : {1.0, 0.3, 0.05}) {
    CHECK(std::abs(jump_generator_apply(TestFunction::energy(3), s, k, eps)) <= 1e-9);
    CHECK(std::abs(jump_generator_apply(TestFunction::momentum(3, {0.3, 1, -2}), s, k, eps)) <= 1e-9);
  }

  SUBCASE("two-particle drift limit") {
    const double d = 1.5;
    const SystemState pair({{d, 0, 0}, {0, 0, 0}});
    const double target = -2.0 / (d * d);
    double prev = 1e300;
    for (double eps : {0.4, 0.2, 0.1, 0.05}) {
      const double err = std::abs(jump_generator_apply(TestFunction::coordinate(2, 0, 0), pair, k, eps) - target);
      CHECK(err < prev);
      prev = err;
    }
    CHECK(prev <= 1e-2 * std::abs(target));
  }
  SUBCASE("degenerate pair") {
    SystemState c = s;
    c.velocities[1] = c.velocities[0];
    CHECK_THROWS_AS(jump_generator_apply(TestFunction::energy(2), c, k, 0.5), Error);
  }
}

TEST_CASE("grazing limit study") {
  Rng rng(43);
  const SystemState s = random_state(2, rng);
  KernelConfig k;
  const std::vector<double> eps{0.4, 0.2, 0.1, 0.05};
  const auto bump = TestFunction::gaussian_bump("bump", 2, {0.3, -0.2, 0.1, -0.4, 0.5, 0}, {0.5, 0.3, 0.6, 0.4, 0.5, 0.7});
  const GrazingReport rep = grazing_limit_study(bump, s, k, eps);
  REQUIRE(rep.rows.size() == 4);
  CHECK(rep.strictly_decreasing);
  CHECK(rep.slope >= 1.0);
  CHECK(rep.order_ok);

  const GrazingReport cons = grazing_limit_study(TestFunction::energy(2), s, k, eps);
  CHECK(cons.conserved);

  CHECK_THROWS_AS(grazing_limit_study(bump, s, k, {0.4, 0.2, 0.1}), Error);
  CHECK_THROWS_AS(grazing_limit_study(bump, s, k, {0.4, 0.2, 0.3, 0.1}), Error);
}
