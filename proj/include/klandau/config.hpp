#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "klandau/diffusion.hpp"
#include "klandau/error.hpp"
#include "klandau/interaction.hpp"
#include "klandau/kernel.hpp"
#include "klandau/random.hpp"
#include "klandau/state.hpp"

namespace klandau {

enum class DynamicsMode { jump, diffusion };
enum class InitialDistribution { gaussian, anisotropic_gaussian, bimaxwellian };

struct SystemSection {
  std::size_t n = 256;
  double alpha = 1.0;
  /// Unset means 1/n.
  std::optional<double> mollifier_scale;
  std::optional<double> identity_weight;
  bool enable_mollifier = true;
};

struct DynamicsSection {
  DynamicsMode mode = DynamicsMode::diffusion;
  double dt = 1e-3;
  double horizon = 1.0;
  double snapshot_interval = 0.1;
  double stability_safety = 0.1;
};

struct EnsembleSection {
  std::size_t runs = 1;
  std::uint64_t master_seed = 1;
};

struct InitialSection {
  InitialDistribution distribution = InitialDistribution::gaussian;
  double temperature = 1.0;
  std::vector<double> temperatures{0.5, 1.0, 1.5};
  double shift = 1.5;
};

struct OutputSection {
  std::string directory = "klandau_out";
  std::vector<std::string> formats{"binary", "jsonl", "csv"};
};

/// Frozen-configuration generator comparison.
struct HarnessSection {
  std::size_t n = 2;
  std::vector<double> epsilons{0.4, 0.2, 0.1, 0.05};
};

struct AnalysisSection {
  std::vector<double> deltas{0.4, 0.2, 0.1, 0.05};
  std::vector<std::size_t> chaos_n{64, 128, 256, 512};
  int entropy_k = 5;
  int bootstrap = 1000;
  int histogram_bins = 20;
  double histogram_vmax = 5.0;
};

struct RunConfig {
  SystemSection system;
  KernelConfig kernel;
  DynamicsSection dynamics;
  EnsembleSection ensemble;
  InitialSection initial;
  OutputSection output;
  HarnessSection harness;
  AnalysisSection analysis;

  InteractionConfig interaction() const { return interaction_for(system.n); }
  /// Same regularization rule for another particle count (unset scales
  /// follow 1/n).
  InteractionConfig interaction_for(std::size_t n) const;
  DiffusionConfig diffusion() const;

  /// Collects every violation; empty when valid.
  std::vector<std::string> violations() const;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Sections of `key = value` lines; `#` and `;` start comments. Throws
/// ConfigError listing all problems found.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

std::string to_string(DynamicsMode m);
std::string to_string(InitialDistribution d);

/// n i.i.d. velocities from the configured initial law, at time 0.
SystemState sample_initial(const InitialSection& init, std::size_t n, Rng& rng);

}  // namespace klandau
