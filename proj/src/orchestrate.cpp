#include "klandau/orchestrate.hpp"

#include <omp.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "json.hpp"

#include "klandau/genharness.hpp"
#include "klandau/jump.hpp"
#include "klandau/snapshot.hpp"

namespace fs = std::filesystem;

namespace klandau {

namespace {

bool has_format(const RunConfig& cfg, const std::string& f) {
  for (const auto& x : cfg.output.formats)
    if (x == f) return true;
  return false;
}

// Shortest round-trip representation; identical bytes on every run.
std::string num(double x) {
  if (!std::isfinite(x)) return "nan";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + p.string() + "'");
  return out;
}

nlohmann::json json_num(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

// Off-center, anisotropic parameters: a bump centered at the origin with an
// isotropic metric is a function of the energy and therefore conserved.
std::vector<double> bump_center(int j) {
  std::vector<double> c(static_cast<std::size_t>(3 * j));
  for (std::size_t a = 0; a < c.size(); ++a) c[a] = 0.4 * std::sin(1.0 + 1.7 * static_cast<double>(a));
  return c;
}

std::vector<double> bump_metric(int j, double scale) {
  std::vector<double> m(static_cast<std::size_t>(3 * j));
  for (std::size_t a = 0; a < m.size(); ++a) m[a] = scale * (0.7 + 0.3 * static_cast<double>(a % 3));
  return m;
}

}  // namespace

RunConfig resolve_config(const CliOptions& opt) {
  RunConfig cfg = opt.config_path.empty() ? parse_config("") : load_config(opt.config_path);
  if (opt.seed) cfg.ensemble.master_seed = *opt.seed;
  if (opt.output) cfg.output.directory = *opt.output;
  if (opt.runs) cfg.ensemble.runs = *opt.runs;
  if (auto v = cfg.violations(); !v.empty()) throw ConfigError(std::move(v));
  return cfg;
}

void set_workers(int workers) {
  if (workers < 1) throw Error("workers must be >= 1");
  omp_set_num_threads(workers);
}

EnsembleRun simulate_ensemble(const RunConfig& cfg, std::size_t n) {
  if (auto v = cfg.violations(); !v.empty()) throw ConfigError(std::move(v));
  EnsembleRun ens;
  ens.n = n;
  ens.interaction = cfg.interaction_for(n);
  ens.master_seed = cfg.ensemble.master_seed;
  ens.times = snapshot_schedule(cfg.dynamics.horizon, cfg.dynamics.snapshot_interval);
  const std::size_t runs = cfg.ensemble.runs;
  ens.runs.resize(runs);

  DiffusionConfig dcfg = cfg.diffusion();
  dcfg.interaction = ens.interaction;

  // Inner kernels parallelize when runs are serial; with several runs the
  // outer loop takes the workers and inner regions run on one thread.
  omp_set_max_active_levels(1);
  std::vector<std::string> failure(runs);
  const long rr = static_cast<long>(runs);
#pragma omp parallel for schedule(dynamic, 1) if (runs > 1)
  for (long ri = 0; ri < rr; ++ri) {
    const auto r = static_cast<std::size_t>(ri);
    try {
      Rng rng(derive_seed(cfg.ensemble.master_seed, r));
      const SystemState init = sample_initial(cfg.initial, n, rng);
      Trajectory traj = cfg.dynamics.mode == DynamicsMode::diffusion
                            ? run_diffusion(init, dcfg, cfg.dynamics.horizon, cfg.dynamics.snapshot_interval, rng)
                            : run_jump(init, cfg.kernel, cfg.dynamics.horizon, cfg.dynamics.snapshot_interval, rng);
      ens.runs[r] = std::move(traj.snapshots);
    } catch (const std::exception& e) {
      failure[r] = "run " + std::to_string(r) + ": " + e.what();
    }
  }
  for (const auto& f : failure)
    if (!f.empty()) throw Error(f);
  return ens;
}

std::string snapshot_path(const std::string& dir, std::size_t run, std::size_t snap) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "run_%04zu/snap_%04zu.bin", run, snap);
  return (fs::path(dir) / buf).string();
}

void write_ensemble(const EnsembleRun& ens, const RunConfig& cfg, const std::string& dir) {
  fs::create_directories(dir);
  if (has_format(cfg, "binary")) {
    for (std::size_t r = 0; r < ens.size(); ++r) {
      fs::create_directories(fs::path(snapshot_path(dir, r, 0)).parent_path());
      for (std::size_t s = 0; s < ens.runs[r].size(); ++s) write_snapshot(ens.runs[r][s], snapshot_path(dir, r, s));
    }
  }
  if (has_format(cfg, "csv")) {
    auto out = open_out(fs::path(dir) / "moments.csv");
    out << "run,snapshot,time,momentum_x,momentum_y,momentum_z,energy\n";
    for (std::size_t r = 0; r < ens.size(); ++r)
      for (std::size_t s = 0; s < ens.runs[r].size(); ++s) {
        const Moments m = moments(ens.runs[r][s]);
        out << r << ',' << s << ',' << num(ens.runs[r][s].time) << ',' << num(m.momentum.x) << ','
            << num(m.momentum.y) << ',' << num(m.momentum.z) << ',' << num(m.energy) << '\n';
      }
  }
}

EnsembleRun load_ensemble(const RunConfig& cfg, const std::string& dir) {
  EnsembleRun ens;
  ens.master_seed = cfg.ensemble.master_seed;
  for (std::size_t r = 0; fs::exists(snapshot_path(dir, r, 0)); ++r) {
    std::vector<SystemState> run;
    for (std::size_t s = 0; fs::exists(snapshot_path(dir, r, s)); ++s) run.push_back(read_snapshot(snapshot_path(dir, r, s)));
    ens.runs.push_back(std::move(run));
  }
  if (ens.runs.empty()) throw Error("no snapshots found under '" + dir + "'");
  ens.n = ens.runs[0][0].size();
  for (const SystemState& s : ens.runs[0]) ens.times.push_back(s.time);
  ens.interaction = cfg.interaction_for(ens.n);
  ens.validate();
  return ens;
}

std::vector<TestFunction> generator_suite(int j) {
  std::vector<TestFunction> suite;
  suite.push_back(TestFunction::energy(j));
  suite.push_back(TestFunction::momentum(j, {1.0, 0.0, 0.0}));
  suite.push_back(TestFunction::coordinate(j, 0, 0));
  suite.push_back(TestFunction::gaussian_bump("gaussian_bump", j, bump_center(j), bump_metric(j, 0.5)));
  suite.push_back(TestFunction::compact_bump("compact_bump", j, bump_center(j), bump_metric(j, 1.0 / 16.0)));
  const auto d = static_cast<std::size_t>(3 * j);
  std::vector<double> g(d), q(d * d, 0.0);
  for (std::size_t a = 0; a < d; ++a) {
    g[a] = 0.3 * std::cos(0.5 + static_cast<double>(a));
    q[a * d + a] = 0.5 + 0.1 * static_cast<double>(a % 3);
  }
  q[0 * d + d - 1] = q[(d - 1) * d + 0] = 0.4;
  suite.push_back(TestFunction::polynomial("quartic", j, 0.0, std::move(g), std::move(q), 0.05, bump_metric(j, 1.0),
                                           bump_center(j)));
  return suite;
}

TestFunction remainder_test_function() {
  return TestFunction::compact_bump("compact_bump_j1", 1, bump_center(1), bump_metric(1, 1.0 / 6.0));
}

std::vector<TestFunction> weak_form_suite() {
  std::vector<TestFunction> suite;
  suite.push_back(remainder_test_function());
  suite.push_back(TestFunction::gaussian_bump("gaussian_bump_j1", 1, bump_center(1), bump_metric(1, 1.0)));
  suite.push_back(TestFunction::energy(1));
  suite.push_back(TestFunction::gaussian_bump("gaussian_bump_j2", 2, bump_center(2), bump_metric(2, 0.5)));
  std::vector<double> q(36, 0.0);
  q[0 * 6 + 3] = q[3 * 6 + 0] = 1.0;
  suite.push_back(TestFunction::polynomial("product_vx_j2", 2, 0.0, {}, std::move(q)));
  return suite;
}

namespace {

int cmd_simulate(const RunConfig& cfg, std::ostream& out, bool quiet) {
  const EnsembleRun ens = simulate_ensemble(cfg);
  write_ensemble(ens, cfg, cfg.output.directory);
  if (!quiet)
    out << "simulate: " << ens.size() << " runs, n = " << ens.n << ", " << ens.times.size() << " snapshots -> "
        << cfg.output.directory << '\n';
  return 0;
}

int cmd_diagnose(const RunConfig& cfg, std::ostream& out, bool quiet) {
  const EnsembleRun ens = load_ensemble(cfg, cfg.output.directory);
  const auto& an = cfg.analysis;
  const fs::path dir(cfg.output.directory);
  const bool jsonl = has_format(cfg, "jsonl"), csv = has_format(cfg, "csv");
  std::ofstream jout, cout_;
  if (jsonl) jout = open_out(dir / "diagnostics.jsonl");
  if (csv) {
    cout_ = open_out(dir / "summary.csv");
    cout_ << "time,momentum_x,momentum_y,momentum_z,energy,energy_se,entropy,entropy_gap,maxwellian_ks,"
             "ks_threshold,chaos,chaos_lo,chaos_hi\n";
  }
  auto energy_obs = [](const Vec3& v) { return norm2(v); };

  for (std::size_t s = 0; s < ens.times.size(); ++s) {
    Vec3 p;
    std::vector<double> e(ens.size());
    std::vector<SystemState> at;
    at.reserve(ens.size());
    for (std::size_t r = 0; r < ens.size(); ++r) {
      const Moments m = moments(ens.runs[r][s]);
      p += m.momentum;
      e[r] = m.energy;
      at.push_back(ens.runs[r][s]);
    }
    p *= 1.0 / static_cast<double>(ens.size());
    const stats::MeanSe em = stats::mean_se(e);
    const std::vector<Vec3> pooled = ens.pooled(s);
    double entropy = std::nan(""), gap = std::nan("");
    if (pooled.size() >= 100) {
      entropy = entropy_estimate(pooled, an.entropy_k);
      gap = maxwellian_entropy(pooled) - entropy;
    }
    const double ks = maxwellian_distance(pooled);
    const double threshold = stats::ks_critical_005(pooled.size());
    const auto hist = speed_histogram(pooled, an.histogram_bins, an.histogram_vmax);
    ChaosEstimate chaos{std::nan(""), std::nan(""), std::nan("")};
    if (ens.size() >= 2)
      chaos = chaos_correlation(at, energy_obs, energy_obs, an.bootstrap, derive_seed(ens.master_seed, s));

    if (jsonl) {
      nlohmann::json rec;
      rec["time"] = ens.times[s];
      rec["runs"] = ens.size();
      rec["n"] = ens.n;
      rec["momentum"] = {p.x, p.y, p.z};
      rec["energy"] = em.mean;
      rec["energy_se"] = json_num(em.se);
      rec["entropy"] = json_num(entropy);
      rec["entropy_gap"] = json_num(gap);
      rec["maxwellian_ks"] = ks;
      rec["ks_threshold"] = threshold;
      rec["speed_histogram"] = {{"vmax", an.histogram_vmax}, {"fractions", hist}};
      rec["chaos_energy"] = {{"value", json_num(chaos.value)}, {"ci_lo", json_num(chaos.ci_lo)},
                             {"ci_hi", json_num(chaos.ci_hi)}};
      jout << rec.dump() << '\n';
    }
    if (csv)
      cout_ << num(ens.times[s]) << ',' << num(p.x) << ',' << num(p.y) << ',' << num(p.z) << ',' << num(em.mean)
            << ',' << num(em.se) << ',' << num(entropy) << ',' << num(gap) << ',' << num(ks) << ','
            << num(threshold) << ',' << num(chaos.value) << ',' << num(chaos.ci_lo) << ',' << num(chaos.ci_hi)
            << '\n';
  }
  if (!quiet) out << "diagnose: " << ens.times.size() << " records -> " << cfg.output.directory << '\n';
  return 0;
}

int cmd_compare_generators(const RunConfig& cfg, std::ostream& out, bool quiet) {
  Rng rng(derive_seed(cfg.ensemble.master_seed, 0));
  const SystemState state = sample_initial(cfg.initial, cfg.harness.n, rng);
  const int j = static_cast<int>(std::min<std::size_t>(cfg.harness.n, 2));
  const auto suite = generator_suite(j);
  std::vector<GrazingReport> reports(suite.size());
  std::vector<std::string> failure(suite.size());
  const long m = static_cast<long>(suite.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < m; ++i) {
    try {
      reports[i] = grazing_limit_study(suite[i], state, cfg.kernel, cfg.harness.epsilons);
    } catch (const std::exception& e) {
      failure[i] = suite[i].name() + ": " + e.what();
    }
  }
  for (const auto& f : failure)
    if (!f.empty()) throw Error(f);

  fs::create_directories(cfg.output.directory);
  auto csv = open_out(fs::path(cfg.output.directory) / "compare_generators.csv");
  csv << "phi,epsilon,jump,diffusion,error,slope,strictly_decreasing,conserved\n";
  for (const auto& rep : reports)
    for (const auto& row : rep.rows)
      csv << rep.phi << ',' << num(row.epsilon) << ',' << num(row.jump_value) << ',' << num(row.diffusion_value)
          << ',' << num(row.error) << ',' << num(rep.slope) << ',' << rep.strictly_decreasing << ','
          << rep.conserved << '\n';
  if (!quiet)
    for (const auto& rep : reports)
      out << rep.phi << ": slope " << rep.slope << (rep.conserved ? " (conserved)" : "")
          << (rep.strictly_decreasing ? "" : " (not strictly decreasing)") << '\n';
  return 0;
}

int cmd_delta_sweep(const RunConfig& cfg, std::ostream& out, bool quiet) {
  if (cfg.dynamics.mode != DynamicsMode::diffusion) throw Error("delta-sweep needs dynamics mode diffusion");
  const EnsembleRun ens = simulate_ensemble(cfg);
  fs::create_directories(cfg.output.directory);
  const fs::path dir(cfg.output.directory);
  auto csv = open_out(dir / "delta_sweep.csv");
  csv << "phi,j,delta,lhs,lhs_se,rhs_delta,rhs_se,remainder_delta,remainder_se,l_term,l_term_se,closure,closure_se,"
         "closure_z\n";
  auto fit_csv = open_out(dir / "delta_fit.csv");
  fit_csv << "phi,j,exponent,se,ci_lo,ci_hi\n";
  for (const TestFunction& phi : weak_form_suite()) {
    const auto est = weak_form_residual(ens, phi, cfg.analysis.deltas);
    for (const auto& e : est)
      csv << phi.name() << ',' << phi.particles() << ',' << num(e.delta) << ',' << num(e.lhs.mean) << ','
          << num(e.lhs.se) << ',' << num(e.rhs_delta.mean) << ',' << num(e.rhs_delta.se) << ','
          << num(e.remainder_delta.mean) << ',' << num(e.remainder_delta.se) << ',' << num(e.l_term.mean) << ','
          << num(e.l_term.se) << ',' << num(e.closure.mean) << ',' << num(e.closure.se) << ','
          << num(e.closure_z) << '\n';
    try {
      const ExponentFit f = fit_remainder_exponent(est);
      fit_csv << phi.name() << ',' << phi.particles() << ',' << num(f.exponent) << ',' << num(f.se) << ','
              << num(f.ci_lo) << ',' << num(f.ci_hi) << '\n';
      if (!quiet) out << phi.name() << ": remainder exponent " << f.exponent << " +- " << 1.96 * f.se << '\n';
    } catch (const Error&) {
      fit_csv << phi.name() << ',' << phi.particles() << ",nan,nan,nan,nan\n";
    }
  }
  return 0;
}

int cmd_chaos_scan(const RunConfig& cfg, std::ostream& out, bool quiet) {
  fs::create_directories(cfg.output.directory);
  auto csv = open_out(fs::path(cfg.output.directory) / "chaos_scan.csv");
  csv << "n,runs,time,value,ci_lo,ci_hi\n";
  auto energy_obs = [](const Vec3& v) { return norm2(v); };
  std::vector<double> mags;
  for (std::size_t n : cfg.analysis.chaos_n) {
    const EnsembleRun ens = simulate_ensemble(cfg, n);
    std::vector<SystemState> last;
    for (const auto& run : ens.runs) last.push_back(run.back());
    const ChaosEstimate c =
        chaos_correlation(last, energy_obs, energy_obs, cfg.analysis.bootstrap, derive_seed(cfg.ensemble.master_seed, n));
    csv << n << ',' << ens.size() << ',' << num(ens.times.back()) << ',' << num(c.value) << ',' << num(c.ci_lo)
        << ',' << num(c.ci_hi) << '\n';
    mags.push_back(std::abs(c.value));
    if (!quiet) out << "n = " << n << ": correlation " << c.value << " [" << c.ci_lo << ", " << c.ci_hi << "]\n";
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < mags.size(); ++i) decreasing = decreasing && mags[i] < mags[i - 1];
  if (!quiet) out << "|correlation| decreasing in n: " << (decreasing ? "yes" : "no") << '\n';
  return 0;
}

}  // namespace

int orchestrate(const CliOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    if (opt.workers) set_workers(*opt.workers);
    const RunConfig cfg = resolve_config(opt);
    if (opt.command == "simulate") return cmd_simulate(cfg, out, opt.quiet);
    if (opt.command == "diagnose") return cmd_diagnose(cfg, out, opt.quiet);
    if (opt.command == "compare-generators") return cmd_compare_generators(cfg, out, opt.quiet);
    if (opt.command == "delta-sweep") return cmd_delta_sweep(cfg, out, opt.quiet);
    if (opt.command == "chaos-scan") return cmd_chaos_scan(cfg, out, opt.quiet);
    err << "error: unknown command '" << opt.command << "'\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace klandau
