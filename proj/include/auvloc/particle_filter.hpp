#pragma once

#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

#include "auvloc/rng.hpp"
#include "auvloc/sensing.hpp"
#include "auvloc/world.hpp"

namespace auvloc {

struct Particle {
  Pose2D pose;
  double weight = 0.0;
};

/// Weighted pose samples approximating the posterior over the vehicle pose.
/// `normalized` asserts the weights sum to 1 (within 1e-9).
struct ParticleSet {
  std::vector<Particle> particles;
  bool normalized = false;
};

struct MotionNoise {
  double sigma_trans = 0.0;
  double sigma_rot1 = 0.0;
  double sigma_rot2 = 0.0;
};

/// Odometry-style relative motion: rotate, translate, rotate, each with
/// independent Gaussian perturbation.
struct MotionCommand {
  double delta_rot1 = 0.0;
  double delta_trans = 0.0;
  double delta_rot2 = 0.0;
  MotionNoise noise;
};

/// Applies the deterministic part of a motion command (no noise).
Pose2D apply_motion(const Pose2D& pose, const MotionCommand& command);

/// Either kind of sensor reading the filter can weight against.
using Observation = std::variant<RangeScan, SemanticObservation>;

/// Pure, deterministic evaluator mapping a pose hypothesis, an observation,
/// and the map to a non-negative weight factor.
using LikelihoodModel = std::function<double(const Pose2D&, const Observation&, const WorldMap&)>;

/// Uniform particles over the free space of the map (rejection-sampled
/// outside objects), headings uniform over [-pi, pi), weights 1/n.
ParticleSet init_uniform(const WorldMap& map, std::size_t count, RngStream& rng);

/// Advances every pose by the motion command with sampled noise. Weights are
/// untouched; headings are re-wrapped.
void predict(ParticleSet& set, const MotionCommand& command, RngStream& rng);

/// Multiplies each weight by the model factor and renormalizes. Returns true
/// when the total weight underflowed to zero and the weights were reset
/// uniform (degeneracy recovery). Throws when the model yields a negative or
/// non-finite factor.
bool weight_update(ParticleSet& set, const Observation& observation, const LikelihoodModel& model,
                   const WorldMap& map);

/// 1 / sum(w^2) for a normalized set; ranges over [1, N].
double effective_sample_size(const ParticleSet& set);

/// Low-variance systematic resampling; output weights are uniform 1/N and the
/// expected copy count of particle i is N * w_i.
void resample_systematic(ParticleSet& set, RngStream& rng);

struct PoseEstimate {
  Pose2D mean;                      // weighted position mean, circular heading mean
  double position_variance = 0.0;   // weighted mean squared distance to the mean (m^2)
  double heading_dispersion = 0.0;  // 1 - circular resultant length, in [0, 1]
};

PoseEstimate estimate(const ParticleSet& set);

struct StepDiagnostics {
  double ess = 0.0;
  bool degenerate = false;
  bool resampled = false;
  PoseEstimate estimate;
  std::int64_t weight_update_ns = 0;  // wall clock of the weight-update phase
};

/// One full filter cycle: predict, weight update, then systematic resampling
/// iff ESS < resample_threshold * N.
StepDiagnostics step(ParticleSet& set, const MotionCommand& command,
                     const Observation& observation, const LikelihoodModel& model,
                     const WorldMap& map, RngStream& rng, double resample_threshold);

}  // namespace auvloc
