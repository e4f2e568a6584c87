#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "auvloc/bench.hpp"

using namespace auvloc;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(path);
  return path;
}

TrialConfig small_config(ModelKind model, std::size_t particles = 100) {
  TrialConfig cfg = default_trial_config();
  cfg.model = model;
  cfg.particle_count = particles;
  cfg.trajectory.resize(16);
  cfg.geometric_sensor.beam_count = 24;
  return cfg;
}

std::size_t count_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::size_t lines = 0;
  std::string line;
  while (std::getline(in, line)) ++lines;
  return lines;
}

}  // namespace

TEST_SUITE("bench") {

TEST_CASE("the block world is a 50 m square of twelve 5 m blocks") {
  const WorldMap map = build_block_world();
  CHECK(map.bounds.width() == doctest::Approx(50.0));
  CHECK(map.bounds.height() == doctest::Approx(50.0));
  CHECK(map.objects.size() == 12);
  for (const auto& object : map.objects) {
    CHECK(object.half_extents.x == doctest::Approx(2.5));
    CHECK(object.half_extents.y == doctest::Approx(2.5));
    CHECK(object.class_label == "block");
  }

  // survives a full write/load cycle, so it satisfies the map invariants
  const auto path = std::filesystem::temp_directory_path() / "auvloc_block_world.json";
  write_map(map, path);
  const WorldMap loaded = load_map(path);
  CHECK(loaded.objects.size() == map.objects.size());
}

TEST_CASE("the default trajectory is a long closed loop through free space") {
  const WorldMap map = build_block_world();
  const auto commands = default_trajectory(map);
  CHECK(commands.size() >= 60);

  Pose2D pose = default_start_pose();
  MotionCommand noiseless;
  for (const auto& command : commands) {
    noiseless = command;
    noiseless.noise = {};
    pose = apply_motion(pose, noiseless);
    CHECK(map.bounds.contains(pose.x, pose.y));
    for (const auto& object : map.objects) {
      CHECK(distance_to_rect(pose.x, pose.y, object.rect()) >= 1.0);
    }
  }
  const Pose2D start = default_start_pose();
  CHECK(std::hypot(pose.x - start.x, pose.y - start.y) <= 1.0);
}

TEST_CASE("time_to_convergence finds the first sustained dip") {
  CHECK(time_to_convergence({5.0, 0.6, 0.4, 0.3}, 0.5) == 2);
  CHECK_FALSE(time_to_convergence({5.0, 2.0, 1.0}, 0.5).has_value());
  CHECK(time_to_convergence({0.4, 0.7, 0.2, 0.1}, 0.5) == 2);
  CHECK(time_to_convergence({0.1, 0.2}, 0.5) == 0);
  CHECK_THROWS_AS(time_to_convergence({1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("run_trial is reproducible apart from wall-clock timings") {
  const TrialConfig cfg = small_config(ModelKind::kSemantic);
  const RunMetrics a = run_trial(cfg);
  const RunMetrics b = run_trial(cfg);

  REQUIRE(a.steps.size() == b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    CHECK(a.steps[i].error_m == b.steps[i].error_m);
    CHECK(a.steps[i].variance_m2 == b.steps[i].variance_m2);
  }
  CHECK(a.convergence_step == b.convergence_step);
  CHECK(a.final_error_m == b.final_error_m);
}

TEST_CASE("a perfectly initialized single particle tracks the truth exactly") {
  TrialConfig cfg = default_trial_config();
  cfg.model = ModelKind::kSemantic;
  cfg.particle_count = 1;
  cfg.init_pose = cfg.start_pose;
  cfg.semantic_sensor.sigma_rho = 0.0;
  cfg.semantic_sensor.sigma_theta = 0.0;
  cfg.semantic_sensor.detect_prob = 1.0;
  for (auto& command : cfg.trajectory) {
    command.noise = {};
  }

  const RunMetrics metrics = run_trial(cfg);
  for (const auto& step : metrics.steps) {
    CHECK(step.error_m == 0.0);
    CHECK(step.variance_m2 == 0.0);
  }
}

TEST_CASE("per-trial seeds are pairwise distinct") {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    seeds.insert(derive_seed(42, i));
  }
  CHECK(seeds.size() == 10000);
}

TEST_CASE("run_batch with one trial reduces to that single run") {
  const TrialConfig cfg = small_config(ModelKind::kSemantic);
  const BatchResult batch = run_batch(cfg, 1, "", 1);

  TrialConfig trial_cfg = cfg;
  trial_cfg.seed = derive_seed(cfg.seed, 0);
  const RunMetrics solo = run_trial(trial_cfg);

  REQUIRE(batch.runs.size() == 1);
  CHECK(batch.runs[0].final_error_m == solo.final_error_m);
  CHECK(batch.runs[0].convergence_step == solo.convergence_step);
  CHECK(batch.mean_final_error_m == solo.final_error_m);
  for (std::size_t i = 0; i < solo.steps.size(); ++i) {
    CHECK(batch.mean_error_curve[i] == solo.steps[i].error_m);
    CHECK(batch.mean_variance_curve[i] == solo.steps[i].variance_m2);
  }
}

TEST_CASE("batch CSV outputs have the documented shape and recompute exactly") {
  const TrialConfig cfg = small_config(ModelKind::kSemantic);
  const auto out = temp_dir("auvloc_batch_out");
  const BatchResult batch = run_batch(cfg, 4, out, 2);

  CHECK(count_lines(out / "per_step.csv") == cfg.step_count() + 1);
  CHECK(count_lines(out / "summary.csv") == 4 + 1);

  // recompute the batch mean of the weight-update totals from the CSV
  std::ifstream in(out / "summary.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "trial,seed,convergence_step,final_error_m,weight_update_ns");
  double total_ns = 0.0;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    const auto last_comma = line.rfind(',');
    total_ns += std::stod(line.substr(last_comma + 1));
    ++rows;
  }
  REQUIRE(rows == 4);
  CHECK(std::abs(total_ns / 4.0 - batch.mean_weight_update_ns) <= 1.0);

  // curves carry no NaN/inf
  for (std::size_t i = 0; i < batch.mean_error_curve.size(); ++i) {
    CHECK(std::isfinite(batch.mean_error_curve[i]));
    CHECK(std::isfinite(batch.mean_variance_curve[i]));
  }
}

TEST_CASE("batch aggregation does not depend on the worker count") {
  const TrialConfig cfg = small_config(ModelKind::kSemantic, 60);
  const BatchResult serial = run_batch(cfg, 6, "", 1);
  const BatchResult parallel = run_batch(cfg, 6, "", 3);
  for (std::size_t i = 0; i < serial.runs.size(); ++i) {
    CHECK(serial.runs[i].final_error_m == parallel.runs[i].final_error_m);
  }
  CHECK(serial.mean_final_error_m == parallel.mean_final_error_m);
}

TEST_CASE("config files override defaults and reject unknown keys") {
  const auto path = std::filesystem::temp_directory_path() / "auvloc_cfg.json";
  {
    std::ofstream out(path);
    out << R"({
      "model": "geometric",
      "particles": 64,
      "steps": 8,
      "seed": 77,
      "geometric_sensor": {"beam_count": 12, "max_range": 40.0},
      "likelihood": {"sigma_range": 1.25, "unmatched_penalty": 0.4},
      "motion_noise": {"sigma_trans": 0.0, "sigma_rot1": 0.0, "sigma_rot2": 0.0},
      "resample_threshold": 0.25
    })";
  }
  const TrialConfig cfg = load_trial_config(path);
  CHECK(cfg.model == ModelKind::kGeometric);
  CHECK(cfg.particle_count == 64);
  CHECK(cfg.step_count() == 8);
  CHECK(cfg.seed == 77);
  CHECK(cfg.geometric_sensor.beam_count == 12);
  CHECK(cfg.geometric_sensor.max_range == 40.0);
  CHECK(cfg.sigma_range == 1.25);
  CHECK(cfg.semantic_params.unmatched_penalty == 0.4);
  CHECK(cfg.trajectory[0].noise.sigma_trans == 0.0);
  CHECK(cfg.resample_threshold == 0.25);

  {
    std::ofstream out(path);
    out << R"({"particels": 64})";
  }
  CHECK_THROWS_WITH_AS(load_trial_config(path), doctest::Contains("unknown key"),
                       std::invalid_argument);

  {
    std::ofstream out(path);
    out << R"({"steps": 3, "trajectory": [{"trans": 1.0}, {"trans": 1.0}]})";
  }
  CHECK_THROWS_AS(load_trial_config(path), std::invalid_argument);
}

TEST_CASE("both models localize on the block world across seeds") {
  TrialConfig cfg = default_trial_config();
  const auto comparison = compare_models(cfg, 20, "", 0);

  CHECK(comparison.time_ratio_geometric_over_semantic > 0.0);
  CHECK(std::isfinite(comparison.time_ratio_geometric_over_semantic));

  // convergence: the estimate comes within 1 m of the truth before the end
  // in at least 90% of seeds, for both models, on identical seeds
  for (const BatchResult* batch : {&comparison.semantic, &comparison.geometric}) {
    int localized = 0;
    for (const RunMetrics& run : batch->runs) {
      bool below = false;
      for (const auto& step : run.steps) {
        if (step.error_m < 1.0) {
          below = true;
          break;
        }
      }
      localized += below ? 1 : 0;
    }
    CHECK(localized >= 18);  // 90% of 20
  }
}

}  // TEST_SUITE("bench")
