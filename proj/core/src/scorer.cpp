#include "curvestream/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "curvestream/error.hpp"

namespace curvestream {
namespace {

void require_same_dimension(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ArgumentError("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()));
  }
}

double one_minus_cosine(double dot, double norm_a, double norm_b) {
  const double cosine = std::clamp(dot / (norm_a * norm_b), -1.0, 1.0);
  return 1.0 - cosine;
}

}  // namespace

double motion_variation(std::span<const double> prev, std::span<const double> curr) {
  require_same_dimension(prev, curr);
  double dot = 0.0;
  double prev_sq = 0.0;
  double curr_sq = 0.0;
  for (std::size_t i = 0; i < prev.size(); ++i) {
    dot += prev[i] * curr[i];
    prev_sq += prev[i] * prev[i];
    curr_sq += curr[i] * curr[i];
  }
  const double prev_norm = std::sqrt(prev_sq);
  const double curr_norm = std::sqrt(curr_sq);
  if (prev_norm < kZeroNormEpsilon || curr_norm < kZeroNormEpsilon) {
    throw ArgumentError("motion_variation: zero-norm vector");
  }
  return one_minus_cosine(dot, prev_norm, curr_norm);
}

CurvatureResult geometric_curvature(std::span<const double> prev2,
                                    std::span<const double> prev1,
                                    std::span<const double> curr) {
  require_same_dimension(prev2, prev1);
  require_same_dimension(prev1, curr);
  double dot = 0.0;
  double d1_sq = 0.0;
  double d2_sq = 0.0;
  for (std::size_t i = 0; i < curr.size(); ++i) {
    const double d1 = prev1[i] - prev2[i];
    const double d2 = curr[i] - prev1[i];
    dot += d1 * d2;
    d1_sq += d1 * d1;
    d2_sq += d2 * d2;
  }
  const double d1_norm = std::sqrt(d1_sq);
  const double d2_norm = std::sqrt(d2_sq);
  if (d1_norm < kDegenerateDisplacementEpsilon || d2_norm < kDegenerateDisplacementEpsilon) {
    return {0.0, true};
  }
  return {one_minus_cosine(dot, d1_norm, d2_norm), false};
}

CurvatureScorer::CurvatureScorer(double lambda) : lambda_(lambda) {
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw ConfigError("lambda must be finite and >= 0");
  }
}

std::optional<ScoreRecord> CurvatureScorer::push(const FrameFeature& frame) {
  if (!window_.empty() && window_.back().vector.size() != frame.dimension()) {
    throw ArgumentError("frame " + std::to_string(frame.frame_id) + " has dimension " +
                        std::to_string(frame.dimension()) + ", window holds " +
                        std::to_string(window_.back().vector.size()));
  }
  window_.push_back({frame.frame_id, frame.vector});
  if (window_.size() > 3) window_.pop_front();

  if (window_.size() == 1) return std::nullopt;

  ScoreRecord record;
  record.frame_id = frame.frame_id;
  record.lambda = lambda_;
  const std::size_t n = window_.size();
  record.motion = motion_variation(window_[n - 2].vector, window_[n - 1].vector);
  if (n == 3) {
    const CurvatureResult c =
        geometric_curvature(window_[0].vector, window_[1].vector, window_[2].vector);
    record.curvature = c.curvature;
    record.degenerate_curvature = c.degenerate;
  } else {
    record.curvature = 0.0;
    record.degenerate_curvature = true;
  }
  record.score = record.motion + lambda_ * record.curvature;
  return record;
}

}  // namespace curvestream
