#include "irs_swipt/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"IRS-aided SWIPT beamforming simulator"};
  app.require_subcommand(1);

  std::string config_path;
  int workers = 1;
  std::string out_path;
  std::uint64_t seed = 0;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "Run a Monte-Carlo sweep and write the result CSV");
  run->add_option("config", config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);
  run->add_option("--workers", workers, "Concurrent trials")->check(CLI::PositiveNumber);
  auto* out_opt = run->add_option("--out", out_path, "Result CSV path (overrides output_path)");
  auto* seed_opt = run->add_option("--seed", seed, "Base seed (overrides base_seed)");
  run->add_flag("--quiet", quiet, "No per-row progress on stderr");

  auto* validate = app.add_subcommand("validate", "Parse and validate a config");
  validate->add_option("config", config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);

  auto* oracle = app.add_subcommand("oracle-check", "Cross-check the solvers against the oracles");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const irs_swipt::ExperimentConfig cfg = irs_swipt::load_config(config_path);
      irs_swipt::RunOptions options;
      options.workers = workers;
      if (*out_opt) options.output_path = out_path;
      if (*seed_opt) options.base_seed = seed;
      if (!quiet) options.progress = &std::cerr;
      const irs_swipt::RunSummary summary = irs_swipt::run_experiment(cfg, options);
      std::cout << "wrote " << summary.rows << " rows to " << summary.output_path << " (timing in "
                << summary.timing_path << ")\n";
      if (summary.failures > 0) {
        std::cerr << summary.failures << " solver runs failed\n";
        return 1;
      }
      return 0;
    }
    if (*validate) {
      const irs_swipt::ExperimentConfig cfg = irs_swipt::load_config(config_path);
      std::cout << "config ok: " << cfg.experiment_id << ", sweep " << irs_swipt::to_string(cfg.sweep_variable)
                << " over " << cfg.sweep_values.size() << " values, " << cfg.n_seeds << " seeds, "
                << cfg.solvers.size() << " solvers -> "
                << cfg.sweep_values.size() * cfg.solvers.size() * static_cast<std::size_t>(cfg.n_seeds)
                << " rows\n";
      return 0;
    }
    if (*oracle) return irs_swipt::run_oracle_checks(std::cout) ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
