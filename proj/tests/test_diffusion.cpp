#include <omp.h>

#include "doctest.h"
#include "helpers.hpp"
#include "klandau/diffusion.hpp"
#include "klandau/error.hpp"
#include "klandau/reference.hpp"
#include "klandau/stats.hpp"

using namespace klandau;
using testing::random_state;

namespace {

// b_(k,a) = sum_(l,b) d B_(ka,lb) / d V_(lb) by central differences of the
// dense matrix.
std::vector<double> fd_row_divergence(const SystemState& s, const InteractionConfig& cfg, double h) {
  const std::size_t d = 3 * s.size();
  std::vector<double> b(d, 0.0);
  for (std::size_t c = 0; c < d; ++c) {
    SystemState plus = s, minus = s;
    plus.flat()[c] += h;
    minus.flat()[c] -= h;
    const Eigen::MatrixXd bp = assemble_B(plus, cfg), bm = assemble_B(minus, cfg);
    for (std::size_t r = 0; r < d; ++r) b[r] += (bp(r, c) - bm(r, c)) / (2 * h);
  }
  return b;
}

double max_abs(const std::vector<Vec3>& v) {
  double m = 0.0;
  for (const Vec3& x : v) m = std::max({m, std::abs(x.x), std::abs(x.y), std::abs(x.z)});
  return m;
}

}  // namespace

TEST_CASE("drift inside the mollifier core vanishes") {
  InteractionConfig cfg = InteractionConfig::for_particles(6);
  cfg.mollifier_scale = 1.0;
  Rng rng(10);
  const SystemState s = random_state(6, rng, 0.05);
  for (const Vec3& b : drift(s, cfg)) CHECK(b == Vec3{});
}

TEST_CASE("two-particle drift closed form") {
  const double d = 1.7;
  const SystemState s({{d, 0, 0}, {0, 0, 0}});
  const auto b = drift(s, InteractionConfig::for_particles(2, 1.0));
  CHECK(b[0].x == doctest::Approx(-2.0 / (d * d)).epsilon(1e-14));
  CHECK(b[0].y == 0.0);
  CHECK(b[0].z == 0.0);
  CHECK(b[1].x == doctest::Approx(2.0 / (d * d)).epsilon(1e-14));
}

TEST_CASE("drift matches the finite-difference row divergence of B") {
  Rng rng(11);
  for (double alpha : {1.0, 0.0, -2.0}) {
    for (int t = 0; t < 10; ++t) {
      const std::size_t n = 2 + static_cast<std::size_t>(t % 7);
      InteractionConfig cfg = InteractionConfig::for_particles(n, alpha);
      // Wide mollifier so that some pairs sit in the annulus.
      cfg.mollifier_scale = 0.4;
      const SystemState s = random_state(n, rng);
      const auto b = drift(s, cfg);
      const auto fd = fd_row_divergence(s, cfg, 1e-5);
      double scale = 0.0, err = 0.0;
      for (std::size_t c = 0; c < fd.size(); ++c) {
        scale = std::max(scale, std::abs(fd[c]));
        err = std::max(err, std::abs(b[c / 3][c % 3] - fd[c]));
      }
      CHECK(err <= 1e-6 * std::max(scale, 1.0));
    }
  }
}

TEST_CASE("parallel drift and noise equal the serial reference") {
  Rng rng(12);
  for (std::size_t n : {2u, 7u, 33u}) {
    const SystemState s = random_state(n, rng);
    const InteractionConfig cfg = InteractionConfig::for_particles(n);
    const auto b = drift(s, cfg), br = reference::drift(s, cfg);
    for (std::size_t k = 0; k < n; ++k) CHECK(norm(b[k] - br[k]) <= 1e-12 * (1.0 + norm(br[k])));
    const NoiseDraws draws = NoiseDraws::draw(n, true, rng);
    const auto w = noise_from_draws(s, cfg, 0.01, draws), wr = reference::noise_from_draws(s, cfg, 0.01, draws);
    for (std::size_t k = 0; k < n; ++k) CHECK(norm(w[k] - wr[k]) <= 1e-12 * (1.0 + norm(wr[k])));
  }
}

TEST_CASE("noise factorization is exact") {
  // The increment is linear in the Gaussian draws, M z; M M^T must be 2 B dt.
  Rng rng(13);
  const std::size_t n = 4;
  const SystemState s = random_state(n, rng);
  InteractionConfig cfg = InteractionConfig::for_particles(n);
  cfg.mollifier_scale = 0.3;
  const double dt = 0.01;
  const NoiseDraws zero = NoiseDraws::draw(n, true, rng);
  const std::size_t m = zero.pair.size() + zero.particle.size();
  Eigen::MatrixXd mat(3 * n, m);
  for (std::size_t c = 0; c < m; ++c) {
    NoiseDraws unit = zero;
    std::fill(unit.pair.begin(), unit.pair.end(), 0.0);
    std::fill(unit.particle.begin(), unit.particle.end(), 0.0);
    if (c < unit.pair.size()) unit.pair[c] = 1.0;
    else unit.particle[c - unit.pair.size()] = 1.0;
    const auto col = noise_from_draws(s, cfg, dt, unit);
    for (std::size_t k = 0; k < n; ++k)
      for (int a = 0; a < 3; ++a) mat(static_cast<Eigen::Index>(3 * k + a), static_cast<Eigen::Index>(c)) = col[k][a];
  }
  const Eigen::MatrixXd cov = mat * mat.transpose();
  const Eigen::MatrixXd target = 2.0 * dt * assemble_B(s, cfg);
  CHECK((cov - target).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("pairwise noise cancels in the momentum") {
  Rng rng(14);
  const std::size_t n = 9;
  InteractionConfig cfg = InteractionConfig::for_particles(n);
  cfg.identity_weight = 0.0;
  const SystemState s = random_state(n, rng);
  for (int t = 0; t < 20; ++t) {
    Vec3 sum;
    for (const Vec3& w : noise_increments(s, cfg, 0.01, rng)) sum += w;
    CHECK(norm(sum) <= 1e-13);
  }
}

TEST_CASE("Euler-Maruyama step") {
  Rng rng(15);
  const std::size_t n = 12;
  DiffusionConfig cfg;
  cfg.interaction = InteractionConfig::for_particles(n);
  const SystemState s = random_state(n, rng);

  CHECK(step_euler_maruyama(s, cfg, 0.0, rng) == s);

  SUBCASE("momentum is conserved without the regularizer") {
    cfg.interaction.identity_weight = 0.0;
    SystemState x = s;
    const Vec3 p0 = total_momentum(x);
    for (int i = 0; i < 50; ++i) x = step_euler_maruyama(x, cfg, 1e-4, rng);
    CHECK(norm(total_momentum(x) - p0) <= 1e-12 * (1.0 + norm(p0)));
    CHECK(x.time == doctest::Approx(50e-4));
  }
  SUBCASE("stability guard") {
    const double g = stability_rate(s, cfg.interaction);
    CHECK(g > 0.0);
    CHECK_THROWS_WITH_AS(step_euler_maruyama(s, cfg, 2.0 * cfg.stability_safety / g, rng),
                         doctest::Contains("stability guard"), Error);
    cfg.guard_enabled = false;
    CHECK_NOTHROW(step_euler_maruyama(s, cfg, 2.0 * cfg.stability_safety / g, rng));
  }
  SUBCASE("blow-up is reported") {
    cfg.guard_enabled = false;
    cfg.interaction.enable_mollifier = false;
    SystemState bad = s;
    bad.velocities[0].x = 1e308;
    bad.velocities[1].x = -1e308;
    CHECK_THROWS_WITH_AS(step_euler_maruyama(bad, cfg, 1.0, rng), "blow-up: reduce dt", Error);
  }
}

TEST_CASE("single particle is Brownian motion with variance 2t") {
  DiffusionConfig cfg;
  cfg.interaction = InteractionConfig::for_particles(1);
  cfg.dt = 0.05;
  const int runs = 4000;
  const double t = 1.0;
  std::vector<double> x2(runs * 3);
  for (int r = 0; r < runs; ++r) {
    Rng rng(derive_seed(99, static_cast<std::uint64_t>(r)));
    const Trajectory tr = run_diffusion(SystemState({{0, 0, 0}}), cfg, t, t, rng);
    const Vec3 v = tr.snapshots.back().velocities[0];
    x2[3 * r] = v.x * v.x;
    x2[3 * r + 1] = v.y * v.y;
    x2[3 * r + 2] = v.z * v.z;
  }
  const auto ms = stats::mean_se(x2);
  CHECK(std::abs(ms.mean - 2.0 * t) <= 5.0 * ms.se);
}

TEST_CASE("run_diffusion schedule and determinism across worker counts") {
  DiffusionConfig cfg;
  const std::size_t n = 64;
  cfg.interaction = InteractionConfig::for_particles(n);
  cfg.dt = 2e-3;
  Rng init_rng(16);
  const SystemState s0 = random_state(n, init_rng);

  Rng r0(1);
  const Trajectory zero = run_diffusion(s0, cfg, 0.0, 0.1, r0);
  REQUIRE(zero.snapshots.size() == 1);
  CHECK(zero.snapshots[0] == s0);

  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  Rng a(77);
  const Trajectory ta = run_diffusion(s0, cfg, 0.05, 0.01, a);
  omp_set_num_threads(4);
  Rng b(77);
  const Trajectory tb = run_diffusion(s0, cfg, 0.05, 0.01, b);
  omp_set_num_threads(saved);
  REQUIRE(ta.snapshots.size() == 6);
  CHECK(ta.snapshots == tb.snapshots);
  CHECK(ta.snapshots.back().time == doctest::Approx(0.05));
}

TEST_CASE("config validation") {
  DiffusionConfig cfg;
  cfg.interaction = InteractionConfig::for_particles(4);
  cfg.dt = -1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.dt = 1e-3;
  cfg.stability_safety = 1.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
}
