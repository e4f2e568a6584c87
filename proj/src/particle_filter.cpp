#include "auvloc/particle_filter.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace auvloc {

namespace {

void require_nonempty(const ParticleSet& set) {
  if (set.particles.empty()) {
    throw std::invalid_argument("particle set must be non-empty");
  }
}

void require_normalized(const ParticleSet& set, const char* op) {
  require_nonempty(set);
  if (!set.normalized) {
    throw std::invalid_argument(std::string(op) + ": particle set is not normalized");
  }
}

}  // namespace

ParticleSet init_uniform(const WorldMap& map, std::size_t count, RngStream& rng) {
  if (count == 0) {
    throw std::invalid_argument("init_uniform: particle count must be >= 1");
  }
  map.validate();

  std::uniform_real_distribution<double> x_dist(map.bounds.min.x, map.bounds.max.x);
  std::uniform_real_distribution<double> y_dist(map.bounds.min.y, map.bounds.max.y);
  std::uniform_real_distribution<double> heading_dist(-kPi, kPi);

  // Rejection sampling over free space; a bounded attempt count turns an
  // object-saturated map into an error instead of an endless loop.
  constexpr int kMaxAttemptsPerParticle = 100000;

  ParticleSet set;
  set.particles.resize(count);
  const double weight = 1.0 / static_cast<double>(count);
  for (auto& particle : set.particles) {
    int attempts = 0;
    for (;;) {
      if (++attempts > kMaxAttemptsPerParticle) {
        throw std::runtime_error("init_uniform: could not sample free space (map full?)");
      }
      const double x = x_dist(rng);
      const double y = y_dist(rng);
      if (!map.inside_any_object(x, y)) {
        particle.pose = {x, y, heading_dist(rng)};
        break;
      }
    }
    particle.weight = weight;
  }
  set.normalized = true;
  return set;
}

namespace {

Pose2D moved_pose(const Pose2D& pose, double rot1, double trans, double rot2) {
  const double mid_heading = wrap_angle(pose.heading + rot1);
  return {pose.x + trans * std::cos(mid_heading), pose.y + trans * std::sin(mid_heading),
          wrap_angle(mid_heading + rot2)};
}

}  // namespace

Pose2D apply_motion(const Pose2D& pose, const MotionCommand& command) {
  return moved_pose(pose, command.delta_rot1, command.delta_trans, command.delta_rot2);
}

void predict(ParticleSet& set, const MotionCommand& command, RngStream& rng) {
  require_nonempty(set);
  const MotionNoise& noise = command.noise;
  std::normal_distribution<double> rot1_noise(0.0, noise.sigma_rot1);
  std::normal_distribution<double> trans_noise(0.0, noise.sigma_trans);
  std::normal_distribution<double> rot2_noise(0.0, noise.sigma_rot2);

  for (auto& particle : set.particles) {
    const double rot1 = command.delta_rot1 + (noise.sigma_rot1 > 0.0 ? rot1_noise(rng) : 0.0);
    const double trans = command.delta_trans + (noise.sigma_trans > 0.0 ? trans_noise(rng) : 0.0);
    const double rot2 = command.delta_rot2 + (noise.sigma_rot2 > 0.0 ? rot2_noise(rng) : 0.0);
    particle.pose = moved_pose(particle.pose, rot1, trans, rot2);
  }
}

bool weight_update(ParticleSet& set, const Observation& observation, const LikelihoodModel& model,
                   const WorldMap& map) {
  require_nonempty(set);

  double total = 0.0;
  for (auto& particle : set.particles) {
    const double factor = model(particle.pose, observation, map);
    if (!std::isfinite(factor) || factor < 0.0) {
      throw std::runtime_error("weight_update: likelihood model returned an invalid factor");
    }
    particle.weight *= factor;
    total += particle.weight;
  }

  if (total <= 0.0) {
    const double uniform = 1.0 / static_cast<double>(set.particles.size());
    for (auto& particle : set.particles) {
      particle.weight = uniform;
    }
    set.normalized = true;
    return true;
  }

  for (auto& particle : set.particles) {
    particle.weight /= total;
  }
  set.normalized = true;
  return false;
}

double effective_sample_size(const ParticleSet& set) {
  require_normalized(set, "effective_sample_size");
  double sum_squares = 0.0;
  for (const auto& particle : set.particles) {
    sum_squares += particle.weight * particle.weight;
  }
  return 1.0 / sum_squares;
}

void resample_systematic(ParticleSet& set, RngStream& rng) {
  require_normalized(set, "resample_systematic");
  const std::size_t n = set.particles.size();
  const double step = 1.0 / static_cast<double>(n);

  std::uniform_real_distribution<double> offset_dist(0.0, step);
  const double offset = offset_dist(rng);

  // Select the first source whose cumulative weight strictly exceeds the
  // pointer; with uniform weights this reproduces the input multiset.
  std::vector<Particle> resampled;
  resampled.reserve(n);
  double cumulative = set.particles[0].weight;
  std::size_t source = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double pointer = offset + static_cast<double>(k) * step;
    while (pointer >= cumulative && source + 1 < n) {
      ++source;
      cumulative += set.particles[source].weight;
    }
    resampled.push_back({set.particles[source].pose, step});
  }

  set.particles = std::move(resampled);
  set.normalized = true;
}

PoseEstimate estimate(const ParticleSet& set) {
  require_normalized(set, "estimate");

  double mean_x = 0.0;
  double mean_y = 0.0;
  double heading_cos = 0.0;
  double heading_sin = 0.0;
  for (const auto& particle : set.particles) {
    mean_x += particle.weight * particle.pose.x;
    mean_y += particle.weight * particle.pose.y;
    heading_cos += particle.weight * std::cos(particle.pose.heading);
    heading_sin += particle.weight * std::sin(particle.pose.heading);
  }

  double variance = 0.0;
  for (const auto& particle : set.particles) {
    const double dx = particle.pose.x - mean_x;
    const double dy = particle.pose.y - mean_y;
    variance += particle.weight * (dx * dx + dy * dy);
  }

  PoseEstimate result;
  result.mean = {mean_x, mean_y, wrap_angle(std::atan2(heading_sin, heading_cos))};
  result.position_variance = variance;
  result.heading_dispersion = 1.0 - std::sqrt(heading_cos * heading_cos + heading_sin * heading_sin);
  return result;
}

StepDiagnostics step(ParticleSet& set, const MotionCommand& command,
                     const Observation& observation, const LikelihoodModel& model,
                     const WorldMap& map, RngStream& rng, double resample_threshold) {
  using Clock = std::chrono::steady_clock;

  predict(set, command, rng);

  const auto update_start = Clock::now();
  const bool degenerate = weight_update(set, observation, model, map);
  const auto update_end = Clock::now();

  StepDiagnostics diagnostics;
  diagnostics.weight_update_ns =
      std::chrono::duration_cast<std::chrono::nanoseconds>(update_end - update_start).count();
  diagnostics.degenerate = degenerate;
  diagnostics.ess = effective_sample_size(set);
  diagnostics.estimate = estimate(set);

  if (diagnostics.ess < resample_threshold * static_cast<double>(set.particles.size())) {
    resample_systematic(set, rng);
    diagnostics.resampled = true;
  }
  return diagnostics;
}

}  // namespace auvloc
