#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "helpers.hpp"
#include "klandau/error.hpp"
#include "klandau/interaction.hpp"
#include "klandau/reference.hpp"

using namespace klandau;
using testing::random_state;
using testing::random_vector;

namespace {

bool mat_near(const Mat3& a, const Mat3& b, double tol) {
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      if (std::abs(a(r, c) - b(r, c)) > tol) return false;
  return true;
}

}  // namespace

TEST_CASE("projection matrix") {
  CHECK(mat_near(projection_matrix({1, 0, 0}), Mat3::diag(0, 1, 1), 0.0));
  CHECK(mat_near(projection_matrix({0, 0, 2}), Mat3::diag(1, 1, 0), 0.0));
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    const Vec3 w{rng.normal(), rng.normal(), rng.normal()};
    const Mat3 p = projection_matrix(w);
    CHECK(mat_near(p * p, p, 1e-14));
    CHECK(norm(p * w) <= 1e-14 * norm(w));
    CHECK(trace(p) == doctest::Approx(2.0).epsilon(1e-14));
  }
  CHECK_THROWS_WITH_AS(projection_matrix({0, 0, 0}), "degenerate direction", Error);
}

TEST_CASE("mollifier profile") {
  const Mollifier m(0.25);
  CHECK(m.chi(0.25) == 1.0);
  CHECK(m.chi(0.5) == 0.0);
  CHECK(m.chi(0.1) == 1.0);
  CHECK(m.chi(0.7) == 0.0);
  double prev = 1.0;
  for (int i = 0; i <= 400; ++i) {
    const double r = 0.2 + 0.35 * i / 400.0;
    const double c = m.chi(r);
    CHECK(c >= 0.0);
    CHECK(c <= 1.0);
    CHECK(c <= prev);
    prev = c;
    CHECK(m.chi_bar(r) == doctest::Approx(1.0 - c));
    const double h = 1e-6;
    const double fd = (m.chi_bar(r + h) - m.chi_bar(r - h)) / (2 * h);
    CHECK(m.chi_bar_derivative(r) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("pair matrix") {
  InteractionConfig cfg = InteractionConfig::for_particles(8);
  CHECK(mat_near(pair_matrix({1, 0, 0}, cfg), Mat3::diag(0, 1, 1), 1e-15));
  CHECK(mat_near(pair_matrix({0.05, 0.0, 0.0}, cfg), Mat3{}, 0.0));
  CHECK(mat_near(pair_matrix({0, 0, 0}, cfg), Mat3{}, 0.0));
  InteractionConfig maxwell = InteractionConfig::for_particles(8, -2.0);
  CHECK(mat_near(pair_matrix({2, 0, 0}, maxwell), 4.0 * Mat3::diag(0, 1, 1), 1e-14));

  InteractionConfig bare = cfg;
  bare.enable_mollifier = false;
  CHECK_THROWS_WITH_AS(pair_coefficient(0.0, bare), doctest::Contains("singular configuration"), Error);
}

TEST_CASE("interaction config validation") {
  InteractionConfig cfg;
  cfg.alpha = 3.0;
  cfg.mollifier_scale = 0.1;
  CHECK_THROWS_WITH_AS(cfg.validate(), "alpha must be < 2", Error);
  cfg.alpha = 1.0;
  cfg.identity_weight = -1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("assemble_B block structure") {
  SUBCASE("two particles, no regularizer") {
    InteractionConfig cfg = InteractionConfig::for_particles(2);
    cfg.identity_weight = 0.0;
    const SystemState s({{0.3, 0.1, -0.2}, {-1.0, 0.4, 0.5}});
    const Eigen::MatrixXd b = assemble_B(s, cfg);
    const Mat3 a = pair_matrix(s.velocities[0] - s.velocities[1], cfg);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) {
        CHECK(b(r, c) == doctest::Approx(a(r, c) / 2));
        CHECK(b(3 + r, 3 + c) == doctest::Approx(a(r, c) / 2));
        CHECK(b(r, 3 + c) == doctest::Approx(-a(r, c) / 2));
        CHECK(b(3 + r, c) == doctest::Approx(-a(r, c) / 2));
      }
  }
  SUBCASE("coincident particles") {
    const std::size_t n = 5;
    const InteractionConfig cfg = InteractionConfig::for_particles(n);
    const SystemState s(std::vector<Vec3>(n, Vec3{0.2, -0.7, 1.1}));
    const Eigen::MatrixXd b = assemble_B(s, cfg);
    CHECK((b - Eigen::MatrixXd::Identity(3 * n, 3 * n) / double(n)).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("random state is symmetric positive semidefinite") {
    Rng rng(2);
    for (int t = 0; t < 20; ++t) {
      const SystemState s = random_state(8, rng);
      const Eigen::MatrixXd b = assemble_B(s, InteractionConfig::for_particles(8));
      CHECK((b - b.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b);
      CHECK(eig.eigenvalues().minCoeff() >= -1e-12);
    }
  }
  SUBCASE("limit") {
    Rng rng(3);
    const SystemState s = random_state(129, rng);
    CHECK_THROWS_WITH_AS(assemble_B(s, InteractionConfig::for_particles(129)), doctest::Contains("dense assembly too large"),
                         Error);
  }
}

TEST_CASE("quadratic form") {
  SUBCASE("constant xi with no regularizer") {
    Rng rng(4);
    InteractionConfig cfg = InteractionConfig::for_particles(6);
    cfg.identity_weight = 0.0;
    const SystemState s = random_state(6, rng);
    std::vector<double> xi;
    for (int i = 0; i < 6; ++i) xi.insert(xi.end(), {0.4, -1.3, 2.0});
    CHECK(quadratic_form(s, cfg, xi) == doctest::Approx(0.0).scale(1.0));
  }
  SUBCASE("two particles, hand evaluation") {
    // One unordered pair, coefficient 1, |P(0,1,0)|^2 = 1, prefactor 1/n.
    InteractionConfig cfg = InteractionConfig::for_particles(2);
    cfg.identity_weight = 0.0;
    const SystemState s({{1, 0, 0}, {0, 0, 0}});
    const std::vector<double> xi{0, 1, 0, 0, 0, 0};
    CHECK(quadratic_form(s, cfg, xi) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(reference::quadratic_form(s, cfg, xi) == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("dense oracle and serial reference") {
    Rng rng(5);
    for (std::size_t n : {2u, 4u, 8u, 16u, 32u}) {
      for (int t = 0; t < 10; ++t) {
        const SystemState s = random_state(n, rng);
        const InteractionConfig cfg = InteractionConfig::for_particles(n);
        const auto xi = random_vector(3 * n, rng);
        const Eigen::Map<const Eigen::VectorXd> x(xi.data(), static_cast<Eigen::Index>(xi.size()));
        const double dense = x.dot(assemble_B(s, cfg) * x);
        const double q = quadratic_form(s, cfg, xi);
        CHECK(q >= 0.0);
        CHECK(testing::rel_err(q, dense) <= 1e-12);
        CHECK(testing::rel_err(q, reference::quadratic_form(s, cfg, xi)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("state validation and moments") {
  CHECK_THROWS_AS(SystemState({{0, 0, 0}}).validate(), Error);
  CHECK_NOTHROW(SystemState({{0, 0, 0}}).validate(true));
  SystemState s({{1, 2, 3}, {-1, 0, 0.5}});
  CHECK(total_momentum(s) == Vec3{0, 2, 3.5});
  CHECK(total_energy(s) == 1 + 4 + 9 + 1 + 0.25);
  s.velocities[1].y = std::nan("");
  CHECK_THROWS_AS(s.validate(), Error);
}
