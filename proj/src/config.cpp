#include "klandau/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace klandau {

namespace {

struct Violation {
  std::string section;
  std::string key;
  std::string message;
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto c = s.find(',');
    out.push_back(trim(s.substr(0, c)));
    if (c == std::string_view::npos) break;
    s.remove_prefix(c + 1);
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::optional<std::uint64_t> to_u64(std::string_view s) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::optional<int> to_int(std::string_view s) {
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

// A setter returns an empty string on success, else the type error.
using Setter = std::function<std::string(std::string_view)>;

Setter real(double& dst) {
  return [&dst](std::string_view v) -> std::string {
    const auto x = to_double(v);
    if (!x) return "expected a number, got '" + std::string(v) + "'";
    dst = *x;
    return {};
  };
}

Setter opt_real(std::optional<double>& dst) {
  return [&dst](std::string_view v) -> std::string {
    const auto x = to_double(v);
    if (!x) return "expected a number, got '" + std::string(v) + "'";
    dst = *x;
    return {};
  };
}

Setter size(std::size_t& dst) {
  return [&dst](std::string_view v) -> std::string {
    const auto x = to_u64(v);
    if (!x) return "expected a nonnegative integer, got '" + std::string(v) + "'";
    dst = static_cast<std::size_t>(*x);
    return {};
  };
}

Setter u64(std::uint64_t& dst) {
  return [&dst](std::string_view v) -> std::string {
    const auto x = to_u64(v);
    if (!x) return "expected an unsigned 64-bit integer, got '" + std::string(v) + "'";
    dst = *x;
    return {};
  };
}

Setter integer(int& dst) {
  return [&dst](std::string_view v) -> std::string {
    const auto x = to_int(v);
    if (!x) return "expected an integer, got '" + std::string(v) + "'";
    dst = *x;
    return {};
  };
}

Setter boolean(bool& dst) {
  return [&dst](std::string_view v) -> std::string {
    if (v == "true") dst = true;
    else if (v == "false") dst = false;
    else return "expected true or false, got '" + std::string(v) + "'";
    return {};
  };
}

Setter real_list(std::vector<double>& dst) {
  return [&dst](std::string_view v) -> std::string {
    std::vector<double> out;
    for (auto item : split_list(v)) {
      const auto x = to_double(item);
      if (!x) return "expected a comma-separated list of numbers, got '" + std::string(v) + "'";
      out.push_back(*x);
    }
    dst = std::move(out);
    return {};
  };
}

Setter size_list(std::vector<std::size_t>& dst) {
  return [&dst](std::string_view v) -> std::string {
    std::vector<std::size_t> out;
    for (auto item : split_list(v)) {
      const auto x = to_u64(item);
      if (!x) return "expected a comma-separated list of integers, got '" + std::string(v) + "'";
      out.push_back(static_cast<std::size_t>(*x));
    }
    dst = std::move(out);
    return {};
  };
}

Setter text(std::string& dst) {
  return [&dst](std::string_view v) -> std::string {
    dst = std::string(v);
    return {};
  };
}

Setter text_list(std::vector<std::string>& dst) {
  return [&dst](std::string_view v) -> std::string {
    dst.clear();
    for (auto item : split_list(v)) dst.emplace_back(item);
    return {};
  };
}

std::map<std::string, std::map<std::string, Setter>> setters(RunConfig& c) {
  std::map<std::string, std::map<std::string, Setter>> s;
  s["system"] = {
      {"n", size(c.system.n)},
      {"alpha", real(c.system.alpha)},
      {"mollifier_scale", opt_real(c.system.mollifier_scale)},
      {"identity_weight", opt_real(c.system.identity_weight)},
      {"enable_mollifier", boolean(c.system.enable_mollifier)},
  };
  s["kernel"] = {
      {"profile",
       [&c](std::string_view v) -> std::string {
         if (v == "gaussian") c.kernel.profile = KernelProfile::gaussian;
         else if (v == "constant") c.kernel.profile = KernelProfile::constant;
         else return "expected gaussian or constant, got '" + std::string(v) + "'";
         return {};
       }},
      {"epsilon", real(c.kernel.epsilon)},
      {"quadrature_order", integer(c.kernel.quadrature_order)},
  };
  s["dynamics"] = {
      {"mode",
       [&c](std::string_view v) -> std::string {
         if (v == "jump") c.dynamics.mode = DynamicsMode::jump;
         else if (v == "diffusion") c.dynamics.mode = DynamicsMode::diffusion;
         else return "expected jump or diffusion, got '" + std::string(v) + "'";
         return {};
       }},
      {"dt", real(c.dynamics.dt)},
      {"horizon", real(c.dynamics.horizon)},
      {"snapshot_interval", real(c.dynamics.snapshot_interval)},
      {"stability_safety", real(c.dynamics.stability_safety)},
  };
  s["ensemble"] = {
      {"runs", size(c.ensemble.runs)},
      {"master_seed", u64(c.ensemble.master_seed)},
  };
  s["initial"] = {
      {"distribution",
       [&c](std::string_view v) -> std::string {
         if (v == "gaussian") c.initial.distribution = InitialDistribution::gaussian;
         else if (v == "anisotropic_gaussian") c.initial.distribution = InitialDistribution::anisotropic_gaussian;
         else if (v == "bimaxwellian") c.initial.distribution = InitialDistribution::bimaxwellian;
         else return "expected gaussian, anisotropic_gaussian or bimaxwellian, got '" + std::string(v) + "'";
         return {};
       }},
      {"temperature", real(c.initial.temperature)},
      {"temperatures", real_list(c.initial.temperatures)},
      {"shift", real(c.initial.shift)},
  };
  s["output"] = {
      {"directory", text(c.output.directory)},
      {"formats", text_list(c.output.formats)},
  };
  s["harness"] = {
      {"n", size(c.harness.n)},
      {"epsilons", real_list(c.harness.epsilons)},
  };
  s["analysis"] = {
      {"deltas", real_list(c.analysis.deltas)},
      {"chaos_n", size_list(c.analysis.chaos_n)},
      {"entropy_k", integer(c.analysis.entropy_k)},
      {"bootstrap", integer(c.analysis.bootstrap)},
      {"histogram_bins", integer(c.analysis.histogram_bins)},
      {"histogram_vmax", real(c.analysis.histogram_vmax)},
  };
  return s;
}

bool positive(double x) { return x > 0.0 && std::isfinite(x); }

std::vector<Violation> check(const RunConfig& c) {
  std::vector<Violation> v;
  auto fail = [&v](const char* section, const char* key, std::string msg) {
    v.push_back({section, key, std::move(msg)});
  };

  if (c.system.n < 2) fail("system", "n", "n must be >= 2");
  if (!(c.system.alpha < 2.0)) fail("system", "alpha", "alpha must be < 2");
  else if (!std::isfinite(c.system.alpha)) fail("system", "alpha", "alpha must be finite");
  if (c.system.mollifier_scale && !positive(*c.system.mollifier_scale))
    fail("system", "mollifier_scale", "mollifier_scale must be > 0");
  if (c.system.identity_weight && !(*c.system.identity_weight >= 0.0 && std::isfinite(*c.system.identity_weight)))
    fail("system", "identity_weight", "identity_weight must be >= 0");

  if (!positive(c.kernel.epsilon)) fail("kernel", "epsilon", "epsilon must be > 0");
  else if (c.kernel.epsilon > 1.0) fail("kernel", "epsilon", "epsilon must be <= 1");
  if (c.kernel.quadrature_order < 2 || c.kernel.quadrature_order > 512)
    fail("kernel", "quadrature_order", "quadrature_order must be in [2, 512]");

  if (!positive(c.dynamics.dt)) fail("dynamics", "dt", "dt must be > 0");
  if (!positive(c.dynamics.horizon)) fail("dynamics", "horizon", "horizon must be > 0");
  if (!positive(c.dynamics.snapshot_interval)) fail("dynamics", "snapshot_interval", "snapshot_interval must be > 0");
  else if (positive(c.dynamics.horizon) && c.dynamics.snapshot_interval > c.dynamics.horizon)
    fail("dynamics", "snapshot_interval", "snapshot_interval must be <= horizon");
  if (!(c.dynamics.stability_safety > 0.0 && c.dynamics.stability_safety <= 1.0))
    fail("dynamics", "stability_safety", "stability_safety must be in (0, 1]");

  if (c.ensemble.runs < 1) fail("ensemble", "runs", "runs must be >= 1");

  if (!positive(c.initial.temperature)) fail("initial", "temperature", "temperature must be > 0");
  if (c.initial.temperatures.size() != 3) fail("initial", "temperatures", "temperatures needs exactly 3 values");
  for (double t : c.initial.temperatures)
    if (!positive(t)) {
      fail("initial", "temperatures", "temperatures must be > 0");
      break;
    }
  if (!(c.initial.shift >= 0.0 && std::isfinite(c.initial.shift))) fail("initial", "shift", "shift must be >= 0");

  if (c.output.directory.empty()) fail("output", "directory", "directory must not be empty");
  for (const auto& f : c.output.formats)
    if (f != "binary" && f != "jsonl" && f != "csv") fail("output", "formats", "unknown format '" + f + "'");

  if (c.harness.n < 2 || c.harness.n > 16) fail("harness", "n", "harness n must be in [2, 16]");
  if (c.harness.epsilons.size() < 4) fail("harness", "epsilons", "epsilons needs at least 4 values");
  for (std::size_t i = 0; i < c.harness.epsilons.size(); ++i) {
    const double e = c.harness.epsilons[i];
    if (!positive(e) || e > 1.0) {
      fail("harness", "epsilons", "epsilons must lie in (0, 1]");
      break;
    }
    if (i > 0 && !(e < c.harness.epsilons[i - 1])) {
      fail("harness", "epsilons", "epsilons must be strictly decreasing");
      break;
    }
  }

  if (c.analysis.deltas.size() < 2) fail("analysis", "deltas", "deltas needs at least 2 values");
  for (double d : c.analysis.deltas)
    if (!positive(d)) {
      fail("analysis", "deltas", "deltas must be > 0");
      break;
    }
  if (c.analysis.chaos_n.size() < 2) fail("analysis", "chaos_n", "chaos_n needs at least 2 values");
  for (std::size_t n : c.analysis.chaos_n)
    if (n < 2) {
      fail("analysis", "chaos_n", "chaos_n values must be >= 2");
      break;
    }
  if (c.analysis.entropy_k < 1 || c.analysis.entropy_k > 16) fail("analysis", "entropy_k", "entropy_k must be in [1, 16]");
  if (c.analysis.bootstrap < 0) fail("analysis", "bootstrap", "bootstrap must be >= 0");
  if (c.analysis.histogram_bins < 1) fail("analysis", "histogram_bins", "histogram_bins must be >= 1");
  if (!positive(c.analysis.histogram_vmax)) fail("analysis", "histogram_vmax", "histogram_vmax must be > 0");
  return v;
}

std::string format(const Violation& v, std::optional<int> line) {
  std::string s = "[" + v.section + "] " + v.key;
  if (line) s += " (line " + std::to_string(*line) + ")";
  return s + ": " + v.message;
}

std::string join(const std::vector<std::string>& lines) {
  std::string s = "invalid configuration:";
  for (const auto& l : lines) s += "\n  " + l;
  return s;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error(join(violations)), violations_(std::move(violations)) {}

InteractionConfig RunConfig::interaction_for(std::size_t n) const {
  InteractionConfig c = InteractionConfig::for_particles(n, system.alpha);
  if (system.mollifier_scale) c.mollifier_scale = *system.mollifier_scale;
  if (system.identity_weight) c.identity_weight = *system.identity_weight;
  c.enable_mollifier = system.enable_mollifier;
  return c;
}

DiffusionConfig RunConfig::diffusion() const {
  DiffusionConfig d;
  d.dt = dynamics.dt;
  d.interaction = interaction();
  d.stability_safety = dynamics.stability_safety;
  return d;
}

std::vector<std::string> RunConfig::violations() const {
  std::vector<std::string> out;
  for (const auto& v : check(*this)) out.push_back(format(v, std::nullopt));
  return out;
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  auto table = setters(cfg);
  std::vector<std::string> errors;
  std::map<std::string, int> section_line;
  std::map<std::string, int> key_line;
  std::string section;
  bool section_known = false;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    const auto hash = line.find_first_of("#;");
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";

    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back(where + "malformed section header");
        section_known = false;
        continue;
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      section_known = table.count(section) > 0;
      if (!section_known) {
        errors.push_back(where + "unknown section [" + section + "]");
        continue;
      }
      const auto [it, fresh] = section_line.emplace(section, line_no);
      if (!fresh)
        errors.push_back(where + "duplicate section [" + section + "] (first defined on line " +
                         std::to_string(it->second) + ")");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      errors.push_back(where + "expected key = value");
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (section.empty()) {
      errors.push_back(where + "key '" + key + "' outside any section");
      continue;
    }
    if (!section_known) continue;
    auto& keys = table[section];
    const auto it = keys.find(key);
    if (it == keys.end()) {
      errors.push_back("[" + section + "] " + key + " (line " + std::to_string(line_no) + "): unknown key");
      continue;
    }
    const std::string full = section + "." + key;
    if (key_line.count(full)) {
      errors.push_back("[" + section + "] " + key + " (line " + std::to_string(line_no) +
                       "): duplicate key (first set on line " + std::to_string(key_line[full]) + ")");
      continue;
    }
    key_line[full] = line_no;
    if (std::string err = it->second(value); !err.empty())
      errors.push_back("[" + section + "] " + key + " (line " + std::to_string(line_no) + "): " + err);
  }

  for (const auto& v : check(cfg)) {
    const auto it = key_line.find(v.section + "." + v.key);
    errors.push_back(format(v, it == key_line.end() ? std::nullopt : std::optional<int>(it->second)));
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_string(DynamicsMode m) { return m == DynamicsMode::jump ? "jump" : "diffusion"; }

std::string to_string(InitialDistribution d) {
  switch (d) {
    case InitialDistribution::gaussian: return "gaussian";
    case InitialDistribution::anisotropic_gaussian: return "anisotropic_gaussian";
    case InitialDistribution::bimaxwellian: return "bimaxwellian";
  }
  return "gaussian";
}

SystemState sample_initial(const InitialSection& init, std::size_t n, Rng& rng) {
  SystemState s;
  s.velocities.resize(n);
  Vec3 sd{std::sqrt(init.temperature), std::sqrt(init.temperature), std::sqrt(init.temperature)};
  if (init.distribution == InitialDistribution::anisotropic_gaussian) {
    if (init.temperatures.size() != 3) throw Error("anisotropic_gaussian needs 3 temperatures");
    sd = {std::sqrt(init.temperatures[0]), std::sqrt(init.temperatures[1]), std::sqrt(init.temperatures[2])};
  }
  for (Vec3& v : s.velocities) {
    v.x = sd.x * rng.normal();
    v.y = sd.y * rng.normal();
    v.z = sd.z * rng.normal();
    if (init.distribution == InitialDistribution::bimaxwellian) v.x += rng.uniform() < 0.5 ? -init.shift : init.shift;
  }
  return s;
}

}  // namespace klandau
