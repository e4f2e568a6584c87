#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "auvloc/likelihood.hpp"
#include "auvloc/particle_filter.hpp"
#include "auvloc/sensing.hpp"
#include "auvloc/world.hpp"

namespace auvloc {

enum class ModelKind { kSemantic, kGeometric };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// Everything a single localization trial needs. Loadable from a JSON file
/// (see load_trial_config); every default is overridable there.
struct TrialConfig {
  std::string map_file;  // empty = builtin block world
  ModelKind model = ModelKind::kSemantic;
  std::size_t particle_count = 1000;
  std::vector<MotionCommand> trajectory;  // one command per step
  Pose2D start_pose;                      // ground-truth start
  std::optional<Pose2D> init_pose;        // when set, all particles start here
  SensorConfig geometric_sensor;
  SensorConfig semantic_sensor;
  SemanticLikelihoodParams semantic_params;
  double sigma_range = 0.3;  // geometric likelihood kernel width (m)
  double resample_threshold = 0.5;
  double convergence_threshold = 0.5;  // m^2, on position variance
  std::uint64_t seed = 1;

  std::size_t step_count() const { return trajectory.size(); }
  void validate() const;
};

struct StepMetrics {
  double error_m = 0.0;
  double variance_m2 = 0.0;
  std::int64_t weight_update_ns = 0;
};

struct RunMetrics {
  std::vector<StepMetrics> steps;
  std::optional<std::size_t> convergence_step;
  double final_error_m = 0.0;
  std::int64_t total_weight_update_ns = 0;
};

/// The fixed 50x50 m test area: twelve 5x5 m blocks in an asymmetric
/// arrangement so no two poses on the default loop see the same
/// constellation.
WorldMap build_block_world();

/// Ground-truth start pose paired with default_trajectory.
Pose2D default_start_pose();

/// Closed 64-command loop around the middle of the block world, staying at
/// least 1 m clear of every object. Deterministic.
std::vector<MotionCommand> default_trajectory(const WorldMap& map);

/// Default motion noise applied to trajectory commands.
MotionNoise default_motion_noise();

/// Block world, default loop, N=1000, semantic model, seed 1.
TrialConfig default_trial_config();

/// Reads a JSON trial configuration; missing fields fall back to the
/// defaults, unknown keys are rejected.
TrialConfig load_trial_config(const std::filesystem::path& path);

/// Runs one localization trial: rolls the ground truth along the trajectory,
/// simulates observations, and records per-step error, particle variance and
/// weight-update wall time. Fully reproducible from cfg.seed.
RunMetrics run_trial(const TrialConfig& cfg);

/// First index from which the variance series stays at or below the
/// threshold; nullopt when it never settles.
std::optional<std::size_t> time_to_convergence(const std::vector<double>& variance_series,
                                               double threshold);

struct BatchResult {
  ModelKind model = ModelKind::kSemantic;
  std::vector<std::uint64_t> trial_seeds;
  std::vector<RunMetrics> runs;
  std::vector<double> mean_error_curve;
  std::vector<double> mean_variance_curve;
  double mean_final_error_m = 0.0;
  double mean_weight_update_ns = 0.0;  // mean of per-trial totals
  std::size_t converged_trials = 0;
  std::optional<double> mean_convergence_step;  // over converged trials
};

/// Runs n_trials independent trials with per-trial seeds derived from
/// cfg.seed (derive_seed(cfg.seed, trial)). Trials may execute concurrently
/// (jobs = 0 uses all cores); aggregation is ordered by trial index, so
/// results do not depend on scheduling. When out_dir is non-empty, writes
/// per_step.csv, summary.csv and report.txt there.
BatchResult run_batch(const TrialConfig& cfg, std::size_t n_trials,
                      const std::filesystem::path& out_dir, std::size_t jobs = 0);

struct ComparisonResult {
  BatchResult semantic;
  BatchResult geometric;
  double time_ratio_geometric_over_semantic = 0.0;
};

/// Runs both measurement models over identical per-trial seeds and reports
/// the weight-update timing ratio. CSVs land in out_dir/semantic and
/// out_dir/geometric, the combined report in out_dir/report.txt.
ComparisonResult compare_models(const TrialConfig& cfg, std::size_t n_trials,
                                const std::filesystem::path& out_dir, std::size_t jobs = 0);

/// Renders the aggregate report (means per model, plus the timing ratio when
/// two models are present).
std::string format_report(const std::vector<BatchResult>& batches, std::size_t n_trials,
                          const TrialConfig& cfg);

}  // namespace auvloc
