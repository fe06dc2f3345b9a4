#include <iostream>

#include "CLI11.hpp"
#include "klandau/orchestrate.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Kac-Landau particle simulator"};
  app.require_subcommand(1);

  klandau::CliOptions opt;
  std::uint64_t seed = 0;
  std::string output;
  std::size_t runs = 0;
  int workers = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "Configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Master seed (overrides the config)");
    sub->add_option("--output", output, "Output directory (overrides the config)");
    sub->add_option("--runs", runs, "Ensemble size (overrides the config)");
    sub->add_option("--workers", workers, "OpenMP worker count")->check(CLI::PositiveNumber);
    sub->add_flag("--quiet", opt.quiet, "Suppress progress output");
  };
  add_common(app.add_subcommand("simulate", "Run the configured dynamics over the ensemble"));
  add_common(app.add_subcommand("compare-generators", "Jump vs diffusion generator sweep over epsilon"));
  add_common(app.add_subcommand("diagnose", "Post-process snapshots into JSONL and CSV"));
  add_common(app.add_subcommand("delta-sweep", "Weak-form hierarchy residuals over delta"));
  add_common(app.add_subcommand("chaos-scan", "Chaos correlation over particle counts"));

  CLI11_PARSE(app, argc, argv);

  CLI::App* sub = app.get_subcommands().front();
  opt.command = sub->get_name();
  if (sub->count("--seed")) opt.seed = seed;
  if (sub->count("--output")) opt.output = output;
  if (sub->count("--runs")) opt.runs = runs;
  if (sub->count("--workers")) opt.workers = workers;
  return klandau::orchestrate(opt, std::cout, std::cerr);
}
