#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "curvestream/feature.hpp"

namespace curvestream {

// Displacements shorter than this carry no direction; curvature is reported
// as 0 and flagged degenerate.
inline constexpr double kDegenerateDisplacementEpsilon = 1e-8;

inline constexpr double kDefaultLambda = 0.2;

// 1 - cosine similarity of two frame vectors. Range [0, 2].
double motion_variation(std::span<const double> prev, std::span<const double> curr);

struct CurvatureResult {
  double curvature = 0.0;
  bool degenerate = false;
};

// 1 - cosine of the angle between the displacements d1 = prev1 - prev2 and
// d2 = curr - prev1. Range [0, 2]; (0, degenerate) when either displacement
// is shorter than kDegenerateDisplacementEpsilon.
CurvatureResult geometric_curvature(std::span<const double> prev2,
                                    std::span<const double> prev1,
                                    std::span<const double> curr);

struct ScoreRecord {
  std::uint64_t frame_id = 0;
  double motion = 0.0;
  double curvature = 0.0;
  double score = 0.0;  // motion + lambda * curvature
  double lambda = 0.0;
  bool degenerate_curvature = false;

  friend bool operator==(const ScoreRecord&, const ScoreRecord&) = default;
};

// Sliding three-frame window producing one curvature-aware score per frame.
//
// The first frame is unscored. The second frame is scored from motion alone
// (curvature 0, flagged degenerate) so thresholds see data one step before a
// full window exists. From the third frame on the score is
// motion + lambda * curvature.
class CurvatureScorer {
 public:
  explicit CurvatureScorer(double lambda = kDefaultLambda);

  std::optional<ScoreRecord> push(const FrameFeature& frame);

  double lambda() const noexcept { return lambda_; }
  std::size_t window_size() const noexcept { return window_.size(); }
  void reset() { window_.clear(); }

 private:
  struct Slot {
    std::uint64_t frame_id;
    std::vector<double> vector;
  };

  double lambda_;
  std::deque<Slot> window_;
};

}  // namespace curvestream
