#include "auvloc/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace auvloc {

std::string to_string(ModelKind kind) {
  return kind == ModelKind::kSemantic ? "semantic" : "geometric";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "semantic") return ModelKind::kSemantic;
  if (name == "geometric") return ModelKind::kGeometric;
  throw std::invalid_argument("unknown model kind: \"" + name + "\" (semantic|geometric)");
}

void TrialConfig::validate() const {
  if (particle_count < 1) throw std::invalid_argument("config: particles must be >= 1");
  if (trajectory.empty()) throw std::invalid_argument("config: trajectory must be non-empty");
  geometric_sensor.validate();
  semantic_sensor.validate();
  semantic_params.validate();
  if (!(sigma_range > 0.0)) throw std::invalid_argument("config: sigma_range must be positive");
  if (resample_threshold < 0.0) {
    throw std::invalid_argument("config: resample_threshold must be >= 0");
  }
  if (!(convergence_threshold > 0.0)) {
    throw std::invalid_argument("config: convergence_threshold must be positive");
  }
  if (!std::isfinite(start_pose.x) || !std::isfinite(start_pose.y) ||
      !std::isfinite(start_pose.heading)) {
    throw std::invalid_argument("config: start_pose must be finite");
  }
}

WorldMap build_block_world() {
  // 5x5 m blocks lining the survey loop at irregular lateral offsets and
  // spacings, so every pose along the loop faces a locally unique
  // constellation; two far blocks keep the remote corners structured. The
  // loop is off the map center, which breaks the wall symmetries too.
  static constexpr double kCenters[][2] = {
      {39.0, 14.0}, {38.5, 23.0}, {39.0, 33.0},  // east of the east leg
      {27.0, 33.5},                              // gate partner west of it
      {18.0, 43.5},                              // north of the north leg
      {6.5, 33.0},  {5.5, 17.0},                 // west flank
      {20.0, 11.0},                              // under the diagonal leg
      {25.0, 5.0},  {33.5, 4.5},                 // south flank
      {45.0, 44.0}, {44.0, 8.0},                 // far corner markers
  };

  WorldMap map;
  map.bounds = {{0.0, 0.0}, {50.0, 50.0}};
  int id = 1;
  for (const auto& center : kCenters) {
    map.objects.push_back({id++, "block", {center[0], center[1]}, {2.5, 2.5}});
  }
  map.validate();
  return map;
}

Pose2D default_start_pose() { return {33.0, 28.0, kPi / 2.0}; }

MotionNoise default_motion_noise() { return {0.1, 0.02, 0.02}; }

std::vector<MotionCommand> default_trajectory(const WorldMap& map) {
  // Survey loop over four waypoints with a diagonal return leg. All leg
  // lengths and directions are distinct, so no rigid transform maps the
  // track onto itself and repeated wall and block evidence can kill every
  // wrong pose mode. The vehicle starts mid-way up the east leg.
  static constexpr Vec2 kWaypoints[] = {
      {33.0, 38.0}, {12.0, 38.0}, {12.0, 22.0}, {33.0, 10.0},
  };
  const Pose2D start = default_start_pose();
  const MotionNoise noise = default_motion_noise();

  std::vector<MotionCommand> commands;
  Vec2 at{start.x, start.y};
  double heading = start.heading;
  for (std::size_t i = 0; i <= std::size(kWaypoints); ++i) {
    const Vec2 target = i < std::size(kWaypoints) ? kWaypoints[i] : Vec2{start.x, start.y};
    const double length = std::hypot(target.x - at.x, target.y - at.y);
    const double leg_heading = std::atan2(target.y - at.y, target.x - at.x);
    const int steps = std::max(1, static_cast<int>(std::lround(length / 1.4)));
    const double stride = length / steps;
    for (int k = 0; k < steps; ++k) {
      commands.push_back({k == 0 ? angle_diff(leg_heading, heading) : 0.0, stride, 0.0, noise});
    }
    heading = leg_heading;
    at = target;
  }

  Pose2D pose = default_start_pose();
  for (const auto& command : commands) {
    pose = apply_motion(pose, command);
    if (!map.bounds.contains(pose.x, pose.y)) {
      throw std::runtime_error("default_trajectory: loop leaves the map bounds");
    }
    for (const auto& object : map.objects) {
      if (distance_to_rect(pose.x, pose.y, object.rect()) < 1.0) {
        throw std::runtime_error("default_trajectory: loop passes within 1 m of object id " +
                                 std::to_string(object.id));
      }
    }
  }
  return commands;
}

TrialConfig default_trial_config() {
  TrialConfig cfg;
  cfg.geometric_sensor = default_geometric_sensor();
  cfg.semantic_sensor = default_semantic_sensor();
  cfg.start_pose = default_start_pose();
  cfg.trajectory = default_trajectory(build_block_world());
  return cfg;
}

namespace {

[[noreturn]] void config_error(const std::string& what) {
  throw std::invalid_argument("trial config: " + what);
}

void reject_unknown_keys(const nlohmann::json& node, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (const auto& item : node.items()) {
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* k) { return item.key() == k; }) == allowed.end()) {
      config_error(where + ": unknown key \"" + item.key() + "\"");
    }
  }
}

double get_number(const nlohmann::json& node, const char* key, double fallback) {
  if (!node.contains(key)) return fallback;
  if (!node[key].is_number()) config_error(std::string("\"") + key + "\" must be a number");
  return node[key].get<double>();
}

Pose2D parse_pose(const nlohmann::json& node, const std::string& where) {
  if (!node.is_array() || node.size() != 3 || !node[0].is_number() || !node[1].is_number() ||
      !node[2].is_number()) {
    config_error(where + " must be [x, y, heading]");
  }
  return {node[0].get<double>(), node[1].get<double>(), wrap_angle(node[2].get<double>())};
}

void parse_sensor(const nlohmann::json& node, SensorConfig& cfg, const std::string& where) {
  if (!node.is_object()) config_error(where + " must be an object");
  reject_unknown_keys(node,
                      {"fov", "max_range", "beam_count", "sigma_range", "sigma_rho", "sigma_theta",
                       "detect_prob", "occlusion", "clutter_rate"},
                      where);
  cfg.fov = get_number(node, "fov", cfg.fov);
  cfg.max_range = get_number(node, "max_range", cfg.max_range);
  if (node.contains("beam_count")) {
    if (!node["beam_count"].is_number_integer()) config_error(where + ".beam_count must be an integer");
    cfg.beam_count = node["beam_count"].get<int>();
  }
  cfg.sigma_range = get_number(node, "sigma_range", cfg.sigma_range);
  cfg.sigma_rho = get_number(node, "sigma_rho", cfg.sigma_rho);
  cfg.sigma_theta = get_number(node, "sigma_theta", cfg.sigma_theta);
  cfg.detect_prob = get_number(node, "detect_prob", cfg.detect_prob);
  if (node.contains("occlusion")) {
    if (!node["occlusion"].is_boolean()) config_error(where + ".occlusion must be a boolean");
    cfg.occlusion = node["occlusion"].get<bool>();
  }
  cfg.clutter_rate = get_number(node, "clutter_rate", cfg.clutter_rate);
}

}  // namespace

TrialConfig load_trial_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open file: " + path.string());

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    config_error("not valid JSON: " + std::string(e.what()));
  }
  if (!doc.is_object()) config_error("top level must be an object");
  reject_unknown_keys(doc,
                      {"map", "model", "particles", "steps", "start_pose", "init_pose",
                       "trajectory", "motion_noise", "geometric_sensor", "semantic_sensor",
                       "likelihood", "resample_threshold", "convergence_threshold", "seed"},
                      "top level");

  TrialConfig cfg = default_trial_config();

  if (doc.contains("map")) {
    if (!doc["map"].is_string()) config_error("\"map\" must be \"builtin\" or a file path");
    const auto value = doc["map"].get<std::string>();
    cfg.map_file = (value == "builtin") ? "" : value;
  }
  if (doc.contains("model")) {
    cfg.model = model_kind_from_string(doc["model"].get<std::string>());
  }
  if (doc.contains("particles")) {
    if (!doc["particles"].is_number_integer() || doc["particles"].get<long long>() < 1) {
      config_error("\"particles\" must be a positive integer");
    }
    cfg.particle_count = doc["particles"].get<std::size_t>();
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer()) config_error("\"seed\" must be an integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("start_pose")) cfg.start_pose = parse_pose(doc["start_pose"], "start_pose");
  if (doc.contains("init_pose") && !doc["init_pose"].is_null()) {
    cfg.init_pose = parse_pose(doc["init_pose"], "init_pose");
  }

  MotionNoise noise = default_motion_noise();
  if (doc.contains("motion_noise")) {
    const auto& node = doc["motion_noise"];
    if (!node.is_object()) config_error("\"motion_noise\" must be an object");
    reject_unknown_keys(node, {"sigma_trans", "sigma_rot1", "sigma_rot2"}, "motion_noise");
    noise.sigma_trans = get_number(node, "sigma_trans", noise.sigma_trans);
    noise.sigma_rot1 = get_number(node, "sigma_rot1", noise.sigma_rot1);
    noise.sigma_rot2 = get_number(node, "sigma_rot2", noise.sigma_rot2);
  }

  if (doc.contains("trajectory")) {
    const auto& node = doc["trajectory"];
    if (!node.is_array() || node.empty()) config_error("\"trajectory\" must be a non-empty array");
    cfg.trajectory.clear();
    for (std::size_t i = 0; i < node.size(); ++i) {
      const auto& entry = node[i];
      const std::string where = "trajectory[" + std::to_string(i) + "]";
      if (!entry.is_object()) config_error(where + " must be an object");
      reject_unknown_keys(entry, {"rot1", "trans", "rot2"}, where);
      MotionCommand command;
      command.delta_rot1 = get_number(entry, "rot1", 0.0);
      command.delta_trans = get_number(entry, "trans", 0.0);
      command.delta_rot2 = get_number(entry, "rot2", 0.0);
      command.noise = noise;
      cfg.trajectory.push_back(command);
    }
  } else {
    for (auto& command : cfg.trajectory) {
      command.noise = noise;
    }
  }

  if (doc.contains("steps")) {
    if (!doc["steps"].is_number_integer() || doc["steps"].get<long long>() < 1) {
      config_error("\"steps\" must be a positive integer");
    }
    const auto steps = doc["steps"].get<std::size_t>();
    if (doc.contains("trajectory")) {
      if (steps != cfg.trajectory.size()) {
        config_error("\"steps\" must equal the trajectory length");
      }
    } else {
      // Cycle the default loop to the requested length.
      const auto loop = cfg.trajectory;
      cfg.trajectory.clear();
      cfg.trajectory.reserve(steps);
      for (std::size_t i = 0; i < steps; ++i) {
        cfg.trajectory.push_back(loop[i % loop.size()]);
      }
    }
  }

  if (doc.contains("geometric_sensor")) {
    parse_sensor(doc["geometric_sensor"], cfg.geometric_sensor, "geometric_sensor");
  }
  if (doc.contains("semantic_sensor")) {
    parse_sensor(doc["semantic_sensor"], cfg.semantic_sensor, "semantic_sensor");
  }
  if (doc.contains("likelihood")) {
    const auto& node = doc["likelihood"];
    if (!node.is_object()) config_error("\"likelihood\" must be an object");
    reject_unknown_keys(
        node, {"sigma_rho", "sigma_theta", "unmatched_penalty", "gate_rho", "gate_theta", "sigma_range"},
        "likelihood");
    cfg.semantic_params.sigma_rho = get_number(node, "sigma_rho", cfg.semantic_params.sigma_rho);
    cfg.semantic_params.sigma_theta =
        get_number(node, "sigma_theta", cfg.semantic_params.sigma_theta);
    cfg.semantic_params.unmatched_penalty =
        get_number(node, "unmatched_penalty", cfg.semantic_params.unmatched_penalty);
    cfg.semantic_params.gate_rho = get_number(node, "gate_rho", cfg.semantic_params.gate_rho);
    cfg.semantic_params.gate_theta = get_number(node, "gate_theta", cfg.semantic_params.gate_theta);
    cfg.sigma_range = get_number(node, "sigma_range", cfg.sigma_range);
  }
  cfg.resample_threshold = get_number(doc, "resample_threshold", cfg.resample_threshold);
  cfg.convergence_threshold = get_number(doc, "convergence_threshold", cfg.convergence_threshold);

  cfg.validate();
  return cfg;
}

std::optional<std::size_t> time_to_convergence(const std::vector<double>& variance_series,
                                               double threshold) {
  if (!(threshold > 0.0)) {
    throw std::invalid_argument("time_to_convergence: threshold must be positive");
  }
  std::size_t first = variance_series.size();
  for (std::size_t i = variance_series.size(); i-- > 0;) {
    if (variance_series[i] <= threshold) {
      first = i;
    } else {
      break;
    }
  }
  if (first == variance_series.size()) return std::nullopt;
  return first;
}

RunMetrics run_trial(const TrialConfig& cfg) {
  cfg.validate();
  const WorldMap map = cfg.map_file.empty() ? build_block_world() : load_map(cfg.map_file);

  const SensorConfig& sensor =
      cfg.model == ModelKind::kSemantic ? cfg.semantic_sensor : cfg.geometric_sensor;
  const LikelihoodModel model = cfg.model == ModelKind::kSemantic
                                    ? make_semantic_model(sensor, cfg.semantic_params)
                                    : make_geometric_model(sensor, cfg.sigma_range);

  // Independent sub-streams per purpose, all derived from the trial seed.
  RngStream init_rng = make_stream(derive_seed(cfg.seed, 0));
  RngStream filter_rng = make_stream(derive_seed(cfg.seed, 1));
  RngStream observation_rng = make_stream(derive_seed(cfg.seed, 2));

  ParticleSet set;
  if (cfg.init_pose) {
    set.particles.assign(cfg.particle_count,
                         {*cfg.init_pose, 1.0 / static_cast<double>(cfg.particle_count)});
    set.normalized = true;
  } else {
    set = init_uniform(map, cfg.particle_count, init_rng);
  }

  RunMetrics metrics;
  metrics.steps.reserve(cfg.trajectory.size());

  Pose2D truth = cfg.start_pose;
  for (const MotionCommand& command : cfg.trajectory) {
    truth = apply_motion(truth, command);

    Observation observation =
        cfg.model == ModelKind::kSemantic
            ? Observation{simulate_semantic_obs(map, truth, sensor, observation_rng)}
            : Observation{simulate_range_scan(map, truth, sensor, observation_rng)};

    const StepDiagnostics diagnostics =
        step(set, command, observation, model, map, filter_rng, cfg.resample_threshold);

    StepMetrics step_metrics;
    const double dx = diagnostics.estimate.mean.x - truth.x;
    const double dy = diagnostics.estimate.mean.y - truth.y;
    step_metrics.error_m = std::sqrt(dx * dx + dy * dy);
    step_metrics.variance_m2 = diagnostics.estimate.position_variance;
    step_metrics.weight_update_ns = diagnostics.weight_update_ns;
    if (!std::isfinite(step_metrics.error_m) || !std::isfinite(step_metrics.variance_m2)) {
      throw std::runtime_error("run_trial: non-finite metric");
    }
    metrics.steps.push_back(step_metrics);
    metrics.total_weight_update_ns += step_metrics.weight_update_ns;
  }

  std::vector<double> variances;
  variances.reserve(metrics.steps.size());
  for (const auto& step_metrics : metrics.steps) {
    variances.push_back(step_metrics.variance_m2);
  }
  metrics.convergence_step = time_to_convergence(variances, cfg.convergence_threshold);
  metrics.final_error_m = metrics.steps.back().error_m;
  return metrics;
}

namespace {

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.9g", value);
  return buffer;
}

void write_per_step_csv(const std::filesystem::path& path, const BatchResult& batch) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "step,mean_error_m,mean_variance_m2\n";
  for (std::size_t i = 0; i < batch.mean_error_curve.size(); ++i) {
    out << i << ',' << format_double(batch.mean_error_curve[i]) << ','
        << format_double(batch.mean_variance_curve[i]) << '\n';
  }
}

void write_summary_csv(const std::filesystem::path& path, const BatchResult& batch) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "trial,seed,convergence_step,final_error_m,weight_update_ns\n";
  for (std::size_t i = 0; i < batch.runs.size(); ++i) {
    const RunMetrics& run = batch.runs[i];
    out << i << ',' << batch.trial_seeds[i] << ',';
    if (run.convergence_step) {
      out << *run.convergence_step;
    } else {
      out << "NONE";
    }
    out << ',' << format_double(run.final_error_m) << ',' << run.total_weight_update_ns << '\n';
  }
}

void aggregate(BatchResult& batch) {
  const std::size_t n = batch.runs.size();
  const std::size_t steps = batch.runs.front().steps.size();
  batch.mean_error_curve.assign(steps, 0.0);
  batch.mean_variance_curve.assign(steps, 0.0);

  double total_final_error = 0.0;
  double total_ns = 0.0;
  double total_convergence = 0.0;
  for (const RunMetrics& run : batch.runs) {
    for (std::size_t i = 0; i < steps; ++i) {
      batch.mean_error_curve[i] += run.steps[i].error_m;
      batch.mean_variance_curve[i] += run.steps[i].variance_m2;
    }
    total_final_error += run.final_error_m;
    total_ns += static_cast<double>(run.total_weight_update_ns);
    if (run.convergence_step) {
      ++batch.converged_trials;
      total_convergence += static_cast<double>(*run.convergence_step);
    }
  }
  for (std::size_t i = 0; i < steps; ++i) {
    batch.mean_error_curve[i] /= static_cast<double>(n);
    batch.mean_variance_curve[i] /= static_cast<double>(n);
  }
  batch.mean_final_error_m = total_final_error / static_cast<double>(n);
  batch.mean_weight_update_ns = total_ns / static_cast<double>(n);
  if (batch.converged_trials > 0) {
    batch.mean_convergence_step = total_convergence / static_cast<double>(batch.converged_trials);
  }
}

}  // namespace

std::string format_report(const std::vector<BatchResult>& batches, std::size_t n_trials,
                          const TrialConfig& cfg) {
  std::ostringstream out;
  out << "trials: " << n_trials << '\n';
  out << "particles: " << cfg.particle_count << '\n';
  out << "steps: " << cfg.step_count() << '\n';
  out << "map: " << (cfg.map_file.empty() ? "builtin block world" : cfg.map_file) << '\n';
  out << "master seed: " << cfg.seed << '\n';

  for (const BatchResult& batch : batches) {
    out << '\n' << "model: " << to_string(batch.model) << '\n';
    out << "  converged trials: " << batch.converged_trials << '/' << batch.runs.size() << '\n';
    out << "  mean convergence step: ";
    if (batch.mean_convergence_step) {
      char buffer[64];
      std::snprintf(buffer, sizeof(buffer), "%.2f", *batch.mean_convergence_step);
      out << buffer << '\n';
    } else {
      out << "NONE\n";
    }
    out << "  mean final error (m): " << format_double(batch.mean_final_error_m) << '\n';
    char ns_buffer[64];
    std::snprintf(ns_buffer, sizeof(ns_buffer), "%.3f", batch.mean_weight_update_ns);
    out << "  mean weight-update time (ns): " << ns_buffer << '\n';
  }

  if (batches.size() == 2) {
    const double ratio = batches[1].mean_weight_update_ns / batches[0].mean_weight_update_ns;
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.4f", ratio);
    out << '\n'
        << "weight-update time ratio (" << to_string(batches[1].model) << '/'
        << to_string(batches[0].model) << "): " << buffer << '\n';
  }
  return out.str();
}

BatchResult run_batch(const TrialConfig& cfg, std::size_t n_trials,
                      const std::filesystem::path& out_dir, std::size_t jobs) {
  if (n_trials < 1) throw std::invalid_argument("run_batch: n_trials must be >= 1");
  cfg.validate();

  BatchResult batch;
  batch.model = cfg.model;
  batch.trial_seeds.resize(n_trials);
  batch.runs.resize(n_trials);
  for (std::size_t i = 0; i < n_trials; ++i) {
    batch.trial_seeds[i] = derive_seed(cfg.seed, i);
  }

  if (jobs == 0) {
    jobs = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  }
  jobs = std::min(jobs, n_trials);

  std::atomic<std::size_t> next_trial{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t index = next_trial.fetch_add(1);
      if (index >= n_trials) return;
      try {
        TrialConfig trial_cfg = cfg;
        trial_cfg.seed = batch.trial_seeds[index];
        batch.runs[index] = run_trial(trial_cfg);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(jobs);
    for (std::size_t i = 0; i < jobs; ++i) {
      threads.emplace_back(worker);
    }
    for (auto& thread : threads) {
      thread.join();
    }
  }
  if (failure) std::rethrow_exception(failure);

  aggregate(batch);

  if (!out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir)) {
      throw std::runtime_error("run_batch: cannot create output directory " + out_dir.string());
    }
    write_per_step_csv(out_dir / "per_step.csv", batch);
    write_summary_csv(out_dir / "summary.csv", batch);
    std::ofstream report(out_dir / "report.txt");
    if (!report) throw std::runtime_error("cannot write report.txt");
    report << format_report({batch}, n_trials, cfg);
  }
  return batch;
}

ComparisonResult compare_models(const TrialConfig& cfg, std::size_t n_trials,
                                const std::filesystem::path& out_dir, std::size_t jobs) {
  TrialConfig semantic_cfg = cfg;
  semantic_cfg.model = ModelKind::kSemantic;
  TrialConfig geometric_cfg = cfg;
  geometric_cfg.model = ModelKind::kGeometric;

  ComparisonResult result;
  result.semantic =
      run_batch(semantic_cfg, n_trials, out_dir.empty() ? out_dir : out_dir / "semantic", jobs);
  result.geometric =
      run_batch(geometric_cfg, n_trials, out_dir.empty() ? out_dir : out_dir / "geometric", jobs);
  result.time_ratio_geometric_over_semantic =
      result.geometric.mean_weight_update_ns / result.semantic.mean_weight_update_ns;

  if (!out_dir.empty()) {
    std::ofstream report(out_dir / "report.txt");
    if (!report) throw std::runtime_error("cannot write report.txt");
    report << format_report({result.semantic, result.geometric}, n_trials, cfg);
  }
  return result;
}

}  // namespace auvloc
