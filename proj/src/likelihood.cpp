#include "auvloc/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace auvloc {

namespace {

double unit_peak_gaussian(double difference, double sigma) {
  const double scaled = difference / sigma;
  return std::exp(-0.5 * scaled * scaled);
}

}  // namespace

void SemanticLikelihoodParams::validate() const {
  if (!(sigma_rho > 0.0) || !(sigma_theta > 0.0)) {
    throw std::invalid_argument("semantic likelihood: kernel widths must be positive");
  }
  if (!(unmatched_penalty > 0.0) || unmatched_penalty > 1.0) {
    throw std::invalid_argument("semantic likelihood: unmatched_penalty must lie in (0, 1]");
  }
  if (!(gate_rho > 0.0) || !(gate_theta > 0.0)) {
    throw std::invalid_argument("semantic likelihood: gates must be positive");
  }
}

MatchResult match_objects(const SemanticObservation& observed, const SemanticObservation& expected,
                          const SemanticLikelihoodParams& params) {
  params.validate();

  struct Candidate {
    double distance;
    std::size_t observed_index;
    std::size_t expected_index;
  };

  std::vector<Candidate> candidates;
  candidates.reserve(observed.detections.size() * expected.detections.size());
  for (std::size_t i = 0; i < observed.detections.size(); ++i) {
    const Detection& a = observed.detections[i];
    for (std::size_t j = 0; j < expected.detections.size(); ++j) {
      const Detection& b = expected.detections[j];
      if (a.class_label != b.class_label) continue;
      const double d_range = a.range - b.range;
      const double d_bearing = angle_diff(a.bearing, b.bearing);
      if (std::abs(d_range) > params.gate_rho || std::abs(d_bearing) > params.gate_theta) {
        continue;
      }
      const double nr = d_range / params.sigma_rho;
      const double nb = d_bearing / params.sigma_theta;
      candidates.push_back({std::sqrt(nr * nr + nb * nb), i, j});
    }
  }

  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    if (a.observed_index != b.observed_index) return a.observed_index < b.observed_index;
    return a.expected_index < b.expected_index;
  });

  std::vector<bool> observed_used(observed.detections.size(), false);
  std::vector<bool> expected_used(expected.detections.size(), false);

  MatchResult result;
  for (const Candidate& candidate : candidates) {
    if (observed_used[candidate.observed_index] || expected_used[candidate.expected_index]) {
      continue;
    }
    observed_used[candidate.observed_index] = true;
    expected_used[candidate.expected_index] = true;
    result.pairs.emplace_back(candidate.observed_index, candidate.expected_index);
  }

  result.matched_count = static_cast<int>(result.pairs.size());
  result.unmatched_count = static_cast<int>(observed.detections.size()) +
                           static_cast<int>(expected.detections.size()) -
                           2 * result.matched_count;
  return result;
}

double semantic_likelihood(const SemanticObservation& observed,
                           const SemanticObservation& expected,
                           const SemanticLikelihoodParams& params) {
  const MatchResult match = match_objects(observed, expected, params);

  double weight = 1.0;
  for (const auto& [observed_index, expected_index] : match.pairs) {
    const Detection& a = observed.detections[observed_index];
    const Detection& b = expected.detections[expected_index];
    weight *= unit_peak_gaussian(a.range - b.range, params.sigma_rho);
    weight *= unit_peak_gaussian(angle_diff(a.bearing, b.bearing), params.sigma_theta);
  }
  weight *= std::pow(params.unmatched_penalty, match.unmatched_count);
  return weight;
}

double geometric_likelihood(const RangeScan& expected, const RangeScan& observed,
                            double sigma_range) {
  if (!(sigma_range > 0.0)) {
    throw std::invalid_argument("geometric likelihood: sigma_range must be positive");
  }
  if (expected.bearings.size() != observed.bearings.size() ||
      expected.bearings != observed.bearings) {
    throw std::invalid_argument("geometric likelihood: scans have mismatched beam bearings");
  }
  if (expected.max_range != observed.max_range) {
    throw std::invalid_argument("geometric likelihood: scans have mismatched max_range");
  }

  double weight = 1.0;
  for (std::size_t i = 0; i < expected.ranges.size(); ++i) {
    const auto& expected_range = expected.ranges[i];
    const auto& observed_range = observed.ranges[i];
    if (!expected_range && !observed_range) {
      continue;  // MISS agrees with MISS
    }
    double residual;
    if (expected_range && observed_range) {
      residual = *observed_range - *expected_range;
    } else {
      const double finite = expected_range ? *expected_range : *observed_range;
      residual = expected.max_range - finite;
    }
    weight *= unit_peak_gaussian(residual, sigma_range);
  }
  return weight;
}

LikelihoodModel make_semantic_model(const SensorConfig& cfg,
                                    const SemanticLikelihoodParams& params) {
  cfg.validate();
  params.validate();
  return [cfg, params](const Pose2D& pose, const Observation& observation,
                       const WorldMap& map) -> double {
    const auto* semantic = std::get_if<SemanticObservation>(&observation);
    if (semantic == nullptr) {
      throw std::invalid_argument("semantic model: observation is not a SemanticObservation");
    }
    try {
      return semantic_likelihood(*semantic, expected_semantic_obs(map, pose, cfg), params);
    } catch (const DegeneratePoseError&) {
      return 0.0;  // hypothesis inside an object or out of bounds
    }
  };
}

LikelihoodModel make_geometric_model(const SensorConfig& cfg, double sigma_range) {
  cfg.validate();
  if (!(sigma_range > 0.0)) {
    throw std::invalid_argument("geometric model: sigma_range must be positive");
  }
  return [cfg, sigma_range](const Pose2D& pose, const Observation& observation,
                            const WorldMap& map) -> double {
    const auto* scan = std::get_if<RangeScan>(&observation);
    if (scan == nullptr) {
      throw std::invalid_argument("geometric model: observation is not a RangeScan");
    }
    try {
      return geometric_likelihood(expected_range_scan(map, pose, cfg), *scan, sigma_range);
    } catch (const DegeneratePoseError&) {
      return 0.0;
    }
  };
}

}  // namespace auvloc
