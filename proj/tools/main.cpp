#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "auvloc/bench.hpp"

namespace {

auvloc::TrialConfig resolve_config(const std::string& config_path,
                                   const std::optional<std::string>& model,
                                   const std::optional<std::uint64_t>& seed) {
  auvloc::TrialConfig cfg = config_path.empty() ? auvloc::default_trial_config()
                                                : auvloc::load_trial_config(config_path);
  if (model) cfg.model = auvloc::model_kind_from_string(*model);
  if (seed) cfg.seed = *seed;
  return cfg;
}

void print_batch(const auvloc::BatchResult& batch) {
  std::cout << "model " << auvloc::to_string(batch.model) << ": " << batch.converged_trials << '/'
            << batch.runs.size() << " trials converged, mean final error "
            << batch.mean_final_error_m << " m, mean weight-update time "
            << static_cast<std::int64_t>(batch.mean_weight_update_ns) << " ns\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D AUV localization benchmark: SIR particle filter with geometric and "
               "semantic measurement models"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> model;
  std::optional<std::uint64_t> seed;
  std::size_t trials = 100;
  std::size_t jobs = 0;
  std::string out_dir = "out";
  std::string map_out;

  auto* run_cmd = app.add_subcommand("run", "Run a batch of localization trials for one model");
  run_cmd->add_option("--config", config_path, "Trial configuration file (JSON)");
  run_cmd->add_option("--model", model, "Measurement model: semantic|geometric");
  run_cmd->add_option("--trials", trials, "Number of trials")->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", seed, "Master seed (overrides the config)");
  run_cmd->add_option("--out", out_dir, "Output directory for CSVs and report");
  run_cmd->add_option("--jobs", jobs, "Worker threads (0 = all cores)");

  auto* compare_cmd =
      app.add_subcommand("compare", "Run both models on identical seeds and report the timing ratio");
  compare_cmd->add_option("--config", config_path, "Trial configuration file (JSON)");
  compare_cmd->add_option("--trials", trials, "Number of trials per model")->check(CLI::PositiveNumber);
  compare_cmd->add_option("--seed", seed, "Master seed (overrides the config)");
  compare_cmd->add_option("--out", out_dir, "Output directory");
  compare_cmd->add_option("--jobs", jobs, "Worker threads (0 = all cores)");

  auto* map_cmd = app.add_subcommand("map", "Map utilities");
  auto* export_cmd = map_cmd->add_subcommand("export", "Write the builtin block world as a map file");
  export_cmd->add_option("--out", map_out, "Output map file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      const auvloc::TrialConfig cfg = resolve_config(config_path, model, seed);
      const auvloc::BatchResult batch = auvloc::run_batch(cfg, trials, out_dir, jobs);
      print_batch(batch);
      std::cout << "wrote " << out_dir << "/per_step.csv, summary.csv, report.txt\n";
    } else if (compare_cmd->parsed()) {
      const auvloc::TrialConfig cfg = resolve_config(config_path, model, seed);
      const auvloc::ComparisonResult comparison = auvloc::compare_models(cfg, trials, out_dir, jobs);
      print_batch(comparison.semantic);
      print_batch(comparison.geometric);
      std::cout << "weight-update time ratio (geometric/semantic): "
                << comparison.time_ratio_geometric_over_semantic << '\n';
      std::cout << "wrote " << out_dir << "/{semantic,geometric}/*.csv and report.txt\n";
    } else if (export_cmd->parsed()) {
      auvloc::write_map(auvloc::build_block_world(), map_out);
      std::cout << "wrote " << map_out << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
