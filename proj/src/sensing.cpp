#include "auvloc/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace auvloc {

namespace {

// Smallest range a clamped noisy measurement may take; keeps ranges in
// (0, max_range] when noise drives them negative.
constexpr double kMinRange = 1e-9;

double gaussian(RngStream& rng, double sigma) {
  std::normal_distribution<double> dist(0.0, sigma);
  return dist(rng);
}

}  // namespace

void SensorConfig::validate() const {
  if (!(fov > 0.0) || fov > kTwoPi) throw std::invalid_argument("sensor: fov must lie in (0, 2*pi]");
  if (!(max_range > 0.0)) throw std::invalid_argument("sensor: max_range must be positive");
  if (beam_count < 1) throw std::invalid_argument("sensor: beam_count must be >= 1");
  if (sigma_range < 0.0 || sigma_rho < 0.0 || sigma_theta < 0.0) {
    throw std::invalid_argument("sensor: noise stds must be >= 0");
  }
  if (detect_prob < 0.0 || detect_prob > 1.0) {
    throw std::invalid_argument("sensor: detect_prob must lie in [0, 1]");
  }
  if (clutter_rate < 0.0) throw std::invalid_argument("sensor: clutter_rate must be >= 0");
}

SensorConfig default_geometric_sensor() {
  SensorConfig cfg;
  cfg.fov = kTwoPi;
  cfg.max_range = 50.0;
  cfg.beam_count = 72;
  cfg.sigma_range = 0.2;
  return cfg;
}

SensorConfig default_semantic_sensor() {
  SensorConfig cfg;
  cfg.fov = kPi;
  cfg.max_range = 20.0;
  cfg.sigma_rho = 0.2;
  cfg.sigma_theta = 0.02;
  cfg.detect_prob = 0.9;
  cfg.occlusion = false;
  return cfg;
}

std::vector<double> beam_bearings(const SensorConfig& cfg) {
  cfg.validate();
  std::vector<double> bearings(static_cast<std::size_t>(cfg.beam_count));
  const int n = cfg.beam_count;
  if (n == 1) {
    bearings[0] = 0.0;
    return bearings;
  }
  // A full-circle scan would repeat the -fov/2 beam at +fov/2; use an open
  // upper end there, a closed span otherwise.
  const bool full_circle = cfg.fov >= kTwoPi - 1e-12;
  const double step = full_circle ? cfg.fov / n : cfg.fov / (n - 1);
  for (int i = 0; i < n; ++i) {
    bearings[static_cast<std::size_t>(i)] = -cfg.fov / 2.0 + step * i;
  }
  return bearings;
}

namespace {

RangeScan range_scan_impl(const WorldMap& map, const Pose2D& pose, const SensorConfig& cfg,
                          RngStream* rng) {
  RangeScan scan;
  scan.bearings = beam_bearings(cfg);
  scan.max_range = cfg.max_range;
  scan.ranges.reserve(scan.bearings.size());
  for (const double bearing : scan.bearings) {
    std::optional<double> range = ray_cast(map, pose, pose.heading + bearing, cfg.max_range);
    if (range && rng != nullptr && cfg.sigma_range > 0.0) {
      const double noisy = *range + gaussian(*rng, cfg.sigma_range);
      range = std::clamp(noisy, kMinRange, cfg.max_range);
    }
    scan.ranges.push_back(range);
  }
  return scan;
}

SemanticObservation semantic_obs_impl(const WorldMap& map, const Pose2D& pose,
                                      const SensorConfig& cfg, RngStream* rng) {
  cfg.validate();
  const auto visible = visible_objects(map, pose, cfg.fov, cfg.max_range, cfg.occlusion);

  SemanticObservation obs;
  obs.detections.reserve(visible.size());
  for (const auto& object : visible) {
    if (rng != nullptr && cfg.detect_prob < 1.0) {
      std::uniform_real_distribution<double> coin(0.0, 1.0);
      if (coin(*rng) >= cfg.detect_prob) {
        continue;
      }
    }
    Detection detection{object.class_label, object.range, object.bearing};
    if (rng != nullptr && cfg.sigma_rho > 0.0) {
      detection.range = std::max(detection.range + gaussian(*rng, cfg.sigma_rho), kMinRange);
    }
    if (rng != nullptr && cfg.sigma_theta > 0.0) {
      detection.bearing = wrap_angle(detection.bearing + gaussian(*rng, cfg.sigma_theta));
    }
    obs.detections.push_back(std::move(detection));
  }
  return obs;
}

}  // namespace

RangeScan simulate_range_scan(const WorldMap& map, const Pose2D& true_pose,
                              const SensorConfig& cfg, RngStream& rng) {
  return range_scan_impl(map, true_pose, cfg, &rng);
}

RangeScan expected_range_scan(const WorldMap& map, const Pose2D& hypothesis,
                              const SensorConfig& cfg) {
  return range_scan_impl(map, hypothesis, cfg, nullptr);
}

SemanticObservation simulate_semantic_obs(const WorldMap& map, const Pose2D& true_pose,
                                          const SensorConfig& cfg, RngStream& rng) {
  return semantic_obs_impl(map, true_pose, cfg, &rng);
}

SemanticObservation expected_semantic_obs(const WorldMap& map, const Pose2D& hypothesis,
                                          const SensorConfig& cfg) {
  return semantic_obs_impl(map, hypothesis, cfg, nullptr);
}

}  // namespace auvloc
