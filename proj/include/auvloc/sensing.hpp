#pragma once

#include <optional>
#include <string>
#include <vector>

#include "auvloc/rng.hpp"
#include "auvloc/world.hpp"

namespace auvloc {

/// A fixed-bearing array of measured ranges. A beam with no return within
/// max_range carries the MISS sentinel (nullopt) instead of a clamped value
/// so measurement models can treat it distinctly.
struct RangeScan {
  std::vector<double> bearings;  // relative to heading, strictly increasing
  std::vector<std::optional<double>> ranges;
  double max_range = 0.0;
};

/// One recognized object: class label plus relative polar coordinates.
/// Detections deliberately carry no object identity.
struct Detection {
  std::string class_label;
  double range = 0.0;    // > 0
  double bearing = 0.0;  // [-pi, pi)
};

struct SemanticObservation {
  std::vector<Detection> detections;
};

struct SensorConfig {
  double fov = kTwoPi;
  double max_range = 50.0;
  int beam_count = 72;        // geometric scans only
  double sigma_range = 0.2;   // beam range noise std (m)
  double sigma_rho = 0.2;     // detection range noise std (m)
  double sigma_theta = 0.02;  // detection bearing noise std (rad)
  double detect_prob = 1.0;
  bool occlusion = false;
  double clutter_rate = 0.0;  // reserved hook; no clutter is generated

  void validate() const;
};

/// 72-beam full-circle scan, mechanically-scanned sonar analogue.
SensorConfig default_geometric_sensor();

/// Forward-looking object detector: pi fov, 20 m, 90% detection rate.
SensorConfig default_semantic_sensor();

/// Beam bearings evenly spanning [-fov/2, fov/2]. A full-circle fov drops the
/// duplicate end beam so bearings stay strictly increasing.
std::vector<double> beam_bearings(const SensorConfig& cfg);

/// Noisy range scan from the true pose: per-beam ray cast plus Gaussian range
/// noise, clamped to (0, max_range]. MISS beams stay MISS.
RangeScan simulate_range_scan(const WorldMap& map, const Pose2D& true_pose,
                              const SensorConfig& cfg, RngStream& rng);

/// Noiseless scan predicted for a pose hypothesis.
RangeScan expected_range_scan(const WorldMap& map, const Pose2D& hypothesis,
                              const SensorConfig& cfg);

/// Noisy object detections from the true pose: visible objects thinned by the
/// detection probability, with Gaussian noise on range and bearing.
SemanticObservation simulate_semantic_obs(const WorldMap& map, const Pose2D& true_pose,
                                          const SensorConfig& cfg, RngStream& rng);

/// Ideal detections predicted for a pose hypothesis; with occlusion disabled
/// this is pure per-object arithmetic and performs no ray casting.
SemanticObservation expected_semantic_obs(const WorldMap& map, const Pose2D& hypothesis,
                                          const SensorConfig& cfg);

}  // namespace auvloc
