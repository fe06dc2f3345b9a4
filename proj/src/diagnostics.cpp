#include "klandau/diagnostics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>
#include <boost/math/special_functions/digamma.hpp>

#include "klandau/error.hpp"
#include "klandau/random.hpp"

namespace klandau {

std::vector<Vec3> EnsembleRun::pooled(std::size_t s) const {
  std::vector<Vec3> out;
  out.reserve(runs.size() * n);
  for (const auto& run : runs) out.insert(out.end(), run[s].velocities.begin(), run[s].velocities.end());
  return out;
}

void EnsembleRun::validate() const {
  if (runs.empty()) throw Error("empty ensemble");
  for (const auto& run : runs) {
    if (run.size() != times.size()) throw Error("ensemble runs must share the snapshot schedule");
    for (const auto& s : run)
      if (s.size() != n) throw Error("ensemble runs must share n");
  }
}

Moments moments(const SystemState& state) {
  Moments m;
  m.momentum = total_momentum(state);
  m.energy = total_energy(state);
  const std::size_t n = state.size();
  if (n == 0) return m;
  const Vec3 mean = (1.0 / static_cast<double>(n)) * m.momentum;
  for (const Vec3& v : state.velocities) m.covariance += outer(v - mean, v - mean);
  m.covariance *= 1.0 / static_cast<double>(n);
  return m;
}

double entropy_estimate(std::span<const Vec3> samples, int k) {
  namespace bg = boost::geometry;
  namespace bgi = boost::geometry::index;
  using Point = bg::model::point<double, 3, bg::cs::cartesian>;

  const std::size_t m = samples.size();
  if (m < 100) throw Error("entropy estimate needs >= 100 samples");
  if (k < 1 || static_cast<std::size_t>(k) >= m) throw Error("invalid neighbour order");

  std::vector<Point> pts;
  pts.reserve(m);
  for (const Vec3& v : samples) pts.emplace_back(v.x, v.y, v.z);
  const bgi::rtree<Point, bgi::rstar<16>> tree(pts.begin(), pts.end());

  std::vector<double> log_rho(m, 0.0);
  int degenerate = 0;
  const long mm = static_cast<long>(m);
#pragma omp parallel for schedule(dynamic, 256)
  for (long ii = 0; ii < mm; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    // k + 1 nearest includes the sample itself at distance 0.
    std::vector<double> d2;
    d2.reserve(static_cast<std::size_t>(k) + 1);
    for (auto it = tree.qbegin(bgi::nearest(pts[i], static_cast<unsigned>(k) + 1)); it != tree.qend(); ++it)
      d2.push_back(bg::comparable_distance(*it, pts[i]));
    std::nth_element(d2.begin(), d2.begin() + k, d2.end());
    if (d2[static_cast<std::size_t>(k)] == 0.0) {
#pragma omp atomic write
      degenerate = 1;
    } else {
      log_rho[i] = 0.5 * std::log(d2[static_cast<std::size_t>(k)]);
    }
  }
  if (degenerate) throw Error("degenerate sample set");

  double mean_log = 0.0;
  for (double v : log_rho) mean_log += v;
  mean_log /= static_cast<double>(m);
  const double log_unit_ball = std::log(4.0 * std::numbers::pi / 3.0);
  return boost::math::digamma(static_cast<double>(m)) - boost::math::digamma(static_cast<double>(k)) +
         log_unit_ball + 3.0 * mean_log;
}

namespace {

struct MaxwellFit {
  Vec3 mean;
  double temperature = 0.0;
};

MaxwellFit fit_maxwellian(std::span<const Vec3> samples) {
  if (samples.empty()) throw Error("no samples");
  MaxwellFit f;
  for (const Vec3& v : samples) f.mean += v;
  f.mean *= 1.0 / static_cast<double>(samples.size());
  double s = 0.0;
  for (const Vec3& v : samples) s += norm2(v - f.mean);
  f.temperature = s / (3.0 * static_cast<double>(samples.size()));
  return f;
}

}  // namespace

double maxwellian_entropy(std::span<const Vec3> samples) {
  const MaxwellFit f = fit_maxwellian(samples);
  return 1.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * f.temperature);
}

double maxwellian_distance(std::span<const Vec3> samples) {
  const MaxwellFit f = fit_maxwellian(samples);
  std::vector<double> speeds;
  speeds.reserve(samples.size());
  for (const Vec3& v : samples) speeds.push_back(norm(v - f.mean));
  const double a = std::sqrt(f.temperature);
  auto cdf = [a](double s) {
    const double x = s / a;
    return std::erf(x / std::numbers::sqrt2) - std::sqrt(2.0 / std::numbers::pi) * x * std::exp(-0.5 * x * x);
  };
  return stats::ks_statistic(std::move(speeds), cdf);
}

std::vector<double> speed_histogram(std::span<const Vec3> samples, int bins, double vmax) {
  std::vector<double> h(static_cast<std::size_t>(bins), 0.0);
  if (samples.empty() || bins <= 0) return h;
  const MaxwellFit f = fit_maxwellian(samples);
  for (const Vec3& v : samples) {
    const auto b = static_cast<long>(norm(v - f.mean) / vmax * bins);
    if (b >= 0 && b < bins) h[static_cast<std::size_t>(b)] += 1.0;
  }
  for (double& x : h) x /= static_cast<double>(samples.size());
  return h;
}

ChaosEstimate chaos_correlation(std::span<const SystemState> runs, const SingleParticleObservable& phi,
                                const SingleParticleObservable& psi, int bootstrap, std::uint64_t seed) {
  const std::size_t r_count = runs.size();
  if (r_count == 0) throw Error("empty ensemble");
  // Per-run sufficient statistics: pair mean of phi(v_i) psi(v_j), i != j,
  // and single-particle means.
  std::vector<double> pair(r_count), mphi(r_count), mpsi(r_count);
  for (std::size_t r = 0; r < r_count; ++r) {
    const auto& v = runs[r].velocities;
    const double n = static_cast<double>(v.size());
    if (v.size() < 2) throw Error("chaos correlation needs n >= 2");
    double sphi = 0.0, spsi = 0.0, sdiag = 0.0;
    for (const Vec3& x : v) {
      const double a = phi(x), b = psi(x);
      sphi += a;
      spsi += b;
      sdiag += a * b;
    }
    pair[r] = (sphi * spsi - sdiag) / (n * (n - 1.0));
    mphi[r] = sphi / n;
    mpsi[r] = spsi / n;
  }
  auto estimate = [&](const std::vector<std::size_t>& idx) {
    double p = 0.0, a = 0.0, b = 0.0;
    for (std::size_t r : idx) p += pair[r], a += mphi[r], b += mpsi[r];
    const double k = static_cast<double>(idx.size());
    return p / k - (a / k) * (b / k);
  };
  std::vector<std::size_t> idx(r_count);
  for (std::size_t r = 0; r < r_count; ++r) idx[r] = r;
  ChaosEstimate out;
  out.value = estimate(idx);
  if (bootstrap <= 0) {
    out.ci_lo = out.ci_hi = out.value;
    return out;
  }
  Rng rng(seed);
  std::vector<double> boots(static_cast<std::size_t>(bootstrap));
  for (double& b : boots) {
    for (std::size_t& i : idx) i = static_cast<std::size_t>(rng.uniform() * static_cast<double>(r_count));
    b = estimate(idx);
  }
  std::sort(boots.begin(), boots.end());
  out.ci_lo = boots[static_cast<std::size_t>(0.025 * (bootstrap - 1))];
  out.ci_hi = boots[static_cast<std::size_t>(0.975 * (bootstrap - 1))];
  return out;
}

WeakFormTerms weak_form_terms(const SystemState& state, const TestFunction& phi, const InteractionConfig& cfg,
                              std::span<const double> deltas, const WeakFormOptions& opt) {
  const std::size_t n = state.size();
  const int j = phi.particles();
  const auto ju = static_cast<std::size_t>(j);
  if (ju >= n) throw Error("weak form needs n > j");
  const double inv_n = 1.0 / static_cast<double>(n);
  const auto& v = state.velocities;
  std::vector<Mollifier> cut;
  for (double d : deltas) cut.emplace_back(d);

  WeakFormTerms out;
  out.c_delta.assign(deltas.size(), 0.0);
  out.cbar_delta.assign(deltas.size(), 0.0);

  const std::size_t tuples = opt.all_tuples ? n / ju : 1;
  std::vector<double> x(3 * ju), xs(3 * ju);
  TestFunction::Eval ev, ev_sw;
  for (std::size_t t = 0; t < tuples; ++t) {
    const std::size_t base = t * ju;
    for (std::size_t s = 0; s < ju; ++s)
      for (int c = 0; c < 3; ++c) x[3 * s + c] = v[base + s][c];
    phi.evaluate(x, ev);
    out.phi += ev.value;

    // L_j^N: pairs inside the tuple plus the identity regularizer.
    double l = 0.0;
    for (int s = 0; s < j; ++s) {
      const Mat3 hss = ev.hess_block(s, s);
      l += cfg.identity_weight * trace(hss);
      for (int q = 0; q < j; ++q) {
        if (q == s) continue;
        const Vec3 w = v[base + s] - v[base + q];
        const double r = norm(w);
        const double coef = pair_coefficient(r, cfg);
        if (coef == 0.0) continue;
        const Mat3 a = coef * projection_matrix(w);
        const Vec3 div_a = (-2.0 * coef / (r * r)) * w;
        l += inv_n * (contract(a, hss) - contract(a, ev.hess_block(s, q)) + 2.0 * dot(div_a, ev.grad_block(s)));
      }
    }
    out.l_term += l;

    // Couplings to every particle outside the tuple.
    for (std::size_t m = 0; m < n; ++m) {
      if (m >= base && m < base + ju) continue;
      for (int s = 0; s < j; ++s) {
        const std::size_t k = base + static_cast<std::size_t>(s);
        const Vec3 w = v[k] - v[m];
        const double r = norm(w);
        const double coef = pair_coefficient(r, cfg);
        if (coef == 0.0) continue;
        const Mat3 a = coef * projection_matrix(w);
        const Vec3 div_a = (-2.0 * coef / (r * r)) * w;
        double term;
        if (opt.symmetrized) {
          xs = x;
          for (int c = 0; c < 3; ++c) xs[3 * s + c] = v[m][c];
          phi.evaluate(xs, ev_sw);
          term = dot(div_a, ev.grad_block(s) - ev_sw.grad_block(s)) +
                 0.5 * contract(a, ev.hess_block(s, s) + ev_sw.hess_block(s, s));
        } else {
          term = 2.0 * dot(div_a, ev.grad_block(s)) + contract(a, ev.hess_block(s, s));
        }
        term *= inv_n;
        for (std::size_t d = 0; d < cut.size(); ++d) {
          const double chi = cut[d].chi(r);
          out.c_delta[d] += (1.0 - chi) * term;
          out.cbar_delta[d] += chi * term;
        }
      }
    }
  }
  const double inv_t = 1.0 / static_cast<double>(tuples);
  out.phi *= inv_t;
  out.l_term *= inv_t;
  for (double& c : out.c_delta) c *= inv_t;
  for (double& c : out.cbar_delta) c *= inv_t;
  return out;
}

namespace {

double trapezoid(std::span<const double> t, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) s += 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
  return s;
}

}  // namespace

std::vector<WeakFormEstimate> weak_form_residual(const EnsembleRun& ensemble, const TestFunction& phi,
                                                 std::span<const double> deltas, const WeakFormOptions& opt) {
  ensemble.validate();
  const std::size_t runs = ensemble.size();
  const std::size_t snaps = ensemble.times.size();
  const std::size_t nd = deltas.size();
  if (snaps < 2) throw Error("weak form needs at least two snapshots");

  // per run: lhs, l, c[d], cbar[d]
  std::vector<double> lhs(runs), lint(runs);
  std::vector<std::vector<double>> cint(nd, std::vector<double>(runs)), cbint(nd, std::vector<double>(runs));

  const long rr = static_cast<long>(runs);
#pragma omp parallel for schedule(dynamic, 1)
  for (long ri = 0; ri < rr; ++ri) {
    const auto r = static_cast<std::size_t>(ri);
    std::vector<double> l(snaps);
    std::vector<std::vector<double>> c(nd, std::vector<double>(snaps)), cb(nd, std::vector<double>(snaps));
    double phi0 = 0.0, phi1 = 0.0;
    for (std::size_t s = 0; s < snaps; ++s) {
      const WeakFormTerms w = weak_form_terms(ensemble.runs[r][s], phi, ensemble.interaction, deltas, opt);
      if (s == 0) phi0 = w.phi;
      if (s + 1 == snaps) phi1 = w.phi;
      l[s] = w.l_term;
      for (std::size_t d = 0; d < nd; ++d) {
        c[d][s] = w.c_delta[d];
        cb[d][s] = w.cbar_delta[d];
      }
    }
    lhs[r] = phi1 - phi0;
    lint[r] = trapezoid(ensemble.times, l);
    for (std::size_t d = 0; d < nd; ++d) {
      cint[d][r] = trapezoid(ensemble.times, c[d]);
      cbint[d][r] = trapezoid(ensemble.times, cb[d]);
    }
  }

  std::vector<WeakFormEstimate> out(nd);
  for (std::size_t d = 0; d < nd; ++d) {
    WeakFormEstimate& e = out[d];
    e.delta = deltas[d];
    e.lhs = stats::mean_se(lhs);
    e.l_term = stats::mean_se(lint);
    e.rhs_delta = stats::mean_se(cint[d]);
    e.remainder_delta = stats::mean_se(cbint[d]);
    std::vector<double> closure(runs);
    for (std::size_t r = 0; r < runs; ++r) closure[r] = lhs[r] - lint[r] - cint[d][r] - cbint[d][r];
    e.closure = stats::mean_se(closure);
    e.closure_z = e.closure.se > 0.0 ? e.closure.mean / e.closure.se : 0.0;
  }
  return out;
}

ExponentFit fit_remainder_exponent(std::span<const WeakFormEstimate> estimates) {
  std::vector<double> x, y, sigma;
  for (const WeakFormEstimate& e : estimates) {
    const double value = std::abs(e.remainder_delta.mean);
    if (!(value > 0.0)) continue;
    x.push_back(std::log(e.delta));
    y.push_back(std::log(value));
    // Floor keeps points whose mean is noise-dominated from carrying weight
    // they do not have.
    sigma.push_back(std::max(e.remainder_delta.se / value, 1e-6));
  }
  if (x.size() < 2) throw Error("remainder fit needs >= 2 nonzero points");
  const stats::LinearFit f = stats::weighted_linear_fit(x, y, sigma);
  ExponentFit out;
  out.exponent = f.slope;
  out.se = f.slope_se;
  out.ci_lo = f.slope - 1.96 * f.slope_se;
  out.ci_hi = f.slope + 1.96 * f.slope_se;
  return out;
}

EntropyGapSeries entropy_gap_series(const EnsembleRun& ensemble, int batches) {
  ensemble.validate();
  EntropyGapSeries out;
  const std::size_t runs = ensemble.size();
  const auto nb = static_cast<std::size_t>(std::max(2, batches));
  for (std::size_t s = 0; s < ensemble.times.size(); ++s) {
    const std::vector<Vec3> pooled = ensemble.pooled(s);
    out.gap.push_back(maxwellian_entropy(pooled) - entropy_estimate(pooled));
    // Batch spread over disjoint groups of runs (or of particles when there
    // are fewer runs than batches).
    std::vector<double> batch_gaps;
    const std::size_t per = pooled.size() / nb;
    for (std::size_t b = 0; b < nb; ++b) {
      std::span<const Vec3> part(pooled.data() + b * per, per);
      if (part.size() < 100) break;
      batch_gaps.push_back(maxwellian_entropy(part) - entropy_estimate(part));
    }
    (void)runs;
    const stats::MeanSe ms = stats::mean_se(batch_gaps);
    out.sigma.push_back(ms.se);
  }
  return out;
}

TrendTest isotonic_trend_test(std::span<const double> series, std::span<const double> sigma, double sigma_mult) {
  const std::vector<double> fit = stats::isotonic_nonincreasing(series);
  TrendTest t;
  t.nonincreasing = true;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double dev = std::abs(series[i] - fit[i]);
    const double allowed = sigma_mult * sigma[i];
    t.max_violation = std::max(t.max_violation, dev / std::max(allowed, 1e-300));
    if (dev > allowed) t.nonincreasing = false;
  }
  return t;
}

}  // namespace klandau
