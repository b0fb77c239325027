#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "curvestream/feature.hpp"
#include "curvestream/memory.hpp"
#include "curvestream/scorer.hpp"

namespace curvestream {

// Engine hyperparameters. Defaults: queue of 20 frames, lambda 0.2, gamma
// 0.9, k1 0.0, k2 1.0, blurred frames downsampled to 224 pixels.
struct EngineConfig {
  double lambda = kDefaultLambda;
  double gamma = kDefaultMomentum;
  double k1 = 0.0;
  double k2 = 1.0;
  std::size_t capacity = 20;
  std::uint32_t transition_size = 224;
  // Nominal side length of a Clear frame; 0 means unknown.
  std::uint32_t high_side = 0;
  double cost_high = 1.0;
  // Unset: (transition_size / high_side)^2 when high_side is known, else 0.25.
  std::optional<double> cost_low;

  double effective_cost_low() const noexcept;

  // Throws ConfigError naming the first violated constraint.
  void validate() const;
};

// Everything the engine produced for one frame.
struct StepTrace {
  std::uint64_t frame_id = 0;
  double timestamp = 0.0;
  std::optional<ScoreRecord> score;          // nullopt for the unscored first frame
  DistributionState distribution;            // after this frame's update
  std::optional<Thresholds> thresholds;      // nullopt when no score was produced
  std::optional<RetentionDecision> decision; // nullopt for an unrouted warm-up frame
  std::vector<std::uint64_t> evicted;
  std::size_t queue_len = 0;
  double tokens_total = 0.0;  // cumulative cost of every admitted frame
};

struct EngineStats {
  std::uint64_t steps = 0;
  std::uint64_t warmup = 0;
  std::uint64_t clear = 0;
  std::uint64_t blurred = 0;
  std::uint64_t discard = 0;
  std::uint64_t forced = 0;
  std::uint64_t queue_len_sum = 0;
  double tokens_total = 0.0;

  // Clear admissions over all admissions; 0 when nothing was admitted.
  double clear_ratio() const noexcept;
  double mean_queue_len() const noexcept;
};

// The online loop: score -> update distribution -> thresholds -> route ->
// admit with FIFO eviction. One engine per stream; not thread-safe.
class Engine {
 public:
  explicit Engine(EngineConfig config);

  // Throws SequencingError unless frame ids strictly increase.
  StepTrace step(const FrameFeature& frame, bool is_query_frame = false);

  // Copies and normalizes `raw`, assigning frame_id = previous id + 1 (0 for
  // the first push) and timestamp = frame_id.
  StepTrace push(std::span<const double> raw, bool is_query_frame = false);

  const EngineConfig& config() const noexcept { return config_; }
  const DistributionState& distribution() const noexcept { return distribution_; }
  const MemoryQueue& queue() const noexcept { return queue_; }
  const EngineStats& stats() const noexcept { return stats_; }

 private:
  EngineConfig config_;
  CurvatureScorer scorer_;
  DistributionState distribution_;
  MemoryQueue queue_;
  EngineStats stats_;
  std::optional<std::uint64_t> last_id_;
};

// Runs a whole stream. Frames whose id appears in `query_frames` are treated
// as query frames.
std::vector<StepTrace> run_engine(std::span<const FrameFeature> frames,
                                  const EngineConfig& config,
                                  std::span<const std::uint64_t> query_frames = {});

}  // namespace curvestream
