#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "auvloc/particle_filter.hpp"
#include "auvloc/sensing.hpp"

namespace auvloc {

struct SemanticLikelihoodParams {
  double sigma_rho = 0.5;      // range-kernel width (m)
  double sigma_theta = 0.05;   // bearing-kernel width (rad)
  double unmatched_penalty = 0.5;  // multiplicative factor per unmatched detection, in (0, 1]
  double gate_rho = 1.5;       // max absolute range difference for a match (m)
  double gate_theta = 0.15;    // max absolute wrapped bearing difference (rad)

  void validate() const;
};

/// One-to-one pairing between two detection lists.
struct MatchResult {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (observed idx, expected idx)
  int matched_count = 0;    // number of pairs
  int unmatched_count = 0;  // detections present in exactly one list
};

/// Greedy one-to-one matching restricted to equal class labels. Candidate
/// pairs are ranked by the gate-normalized distance
/// sqrt((d_range/sigma_rho)^2 + (d_bearing/sigma_theta)^2) and accepted in
/// order while both indices are free and the differences pass the gates.
/// Ties resolve toward lower observed index, then lower expected index.
MatchResult match_objects(const SemanticObservation& observed, const SemanticObservation& expected,
                          const SemanticLikelihoodParams& params);

/// Product over matched pairs of unit-peak Gaussians in the range and bearing
/// differences, times unmatched_penalty per unmatched detection. Identical
/// observations score exactly 1; two empty observations score 1.
double semantic_likelihood(const SemanticObservation& observed,
                           const SemanticObservation& expected,
                           const SemanticLikelihoodParams& params);

/// Product over beams of unit-peak Gaussians in the range residuals. A beam
/// that is MISS in both scans contributes 1; MISS against a finite return is
/// scored at (max_range - finite). Throws when beam counts or bearing arrays
/// differ.
double geometric_likelihood(const RangeScan& expected, const RangeScan& observed,
                            double sigma_range);

/// Evaluator: hypothesis -> semantic_likelihood(observed, predicted ideal
/// detections for the hypothesis). A hypothesis whose predicted observation
/// is undefined (pose inside an object with occlusion on, or out of bounds)
/// scores 0.
LikelihoodModel make_semantic_model(const SensorConfig& cfg,
                                    const SemanticLikelihoodParams& params);

/// Evaluator: hypothesis -> geometric_likelihood(predicted scan, observed).
/// Degenerate hypotheses score 0 as above.
LikelihoodModel make_geometric_model(const SensorConfig& cfg, double sigma_range);

}  // namespace auvloc
