#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "klandau/config.hpp"
#include "klandau/diagnostics.hpp"
#include "klandau/test_function.hpp"

namespace klandau {

struct CliOptions {
  std::string command;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  std::optional<std::size_t> runs;
  std::optional<int> workers;
  bool quiet = false;
};

/// Loads the config (defaults when no path is given), applies command-line
/// overrides and revalidates.
RunConfig resolve_config(const CliOptions& opt);

/// Sets the OpenMP worker count for the whole process.
void set_workers(int workers);

/// Runs the configured dynamics for every ensemble member with n particles.
/// Run r draws its initial data and noise from derive_seed(master_seed, r).
EnsembleRun simulate_ensemble(const RunConfig& cfg, std::size_t n);
inline EnsembleRun simulate_ensemble(const RunConfig& cfg) { return simulate_ensemble(cfg, cfg.system.n); }

/// <dir>/run_XXXX/snap_YYYY.bin for every snapshot, plus <dir>/moments.csv
/// when csv output is enabled.
void write_ensemble(const EnsembleRun& ensemble, const RunConfig& cfg, const std::string& dir);
EnsembleRun load_ensemble(const RunConfig& cfg, const std::string& dir);

std::string snapshot_path(const std::string& dir, std::size_t run, std::size_t snap);

/// Observables used by compare-generators on a j-particle frozen state.
std::vector<TestFunction> generator_suite(int j);
/// Weak-form hierarchy suite: five functions with j in {1, 2}.
std::vector<TestFunction> weak_form_suite();
/// Compactly supported one-particle bump used for the delta scaling.
TestFunction remainder_test_function();

/// Dispatches a subcommand; returns the process exit status. Errors are
/// reported on `err`.
int orchestrate(const CliOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace klandau
