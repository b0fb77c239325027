#pragma once

#include <cstdint>
#include <deque>
#include <string_view>
#include <vector>

namespace curvestream {

// Online EMA estimate of the score distribution.
//   mean     <- gamma * mean + (1 - gamma) * score
//   variance <- gamma * variance + (1 - gamma) * (score - mean)^2
// The variance update uses the freshly updated mean.
struct DistributionState {
  double mean = 0.0;
  double variance = 0.0;
  double momentum = 0.9;
  std::uint64_t observations = 0;

  friend bool operator==(const DistributionState&, const DistributionState&) = default;
};

inline constexpr double kDefaultMomentum = 0.9;

// Throws ArgumentError if `score` is negative or not finite.
DistributionState update_distribution(const DistributionState& dist, double score);

struct Thresholds {
  double g1 = 0.0;
  double g2 = 0.0;
  double k1 = 0.0;
  double k2 = 1.0;

  friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

// g = mean + k * sqrt(variance). Throws ConfigError unless k1 < k2.
Thresholds thresholds_from(const DistributionState& dist, double k1, double k2);

enum class RetentionState : std::uint8_t { kDiscard = 0, kBlurred = 1, kClear = 2 };
enum class Resolution : std::uint8_t { kNone = 0, kLow = 1, kHigh = 2 };

std::string_view to_string(RetentionState state) noexcept;

constexpr Resolution resolution_for(RetentionState state) noexcept {
  switch (state) {
    case RetentionState::kClear:
      return Resolution::kHigh;
    case RetentionState::kBlurred:
      return Resolution::kLow;
    case RetentionState::kDiscard:
      break;
  }
  return Resolution::kNone;
}

struct Route {
  RetentionState state;
  Resolution resolution;
};

// score >= g2 (or a query frame) -> Clear; g1 <= score < g2 -> Blurred;
// otherwise Discard.
Route route(double score, const Thresholds& th, bool is_query_frame) noexcept;

struct RetentionDecision {
  std::uint64_t frame_id = 0;
  RetentionState state = RetentionState::kDiscard;
  Resolution resolution = Resolution::kNone;
  double token_cost = 0.0;
  Thresholds thresholds;
  double score = 0.0;
  bool forced_by_query = false;
};

struct MemoryEntry {
  std::uint64_t frame_id = 0;
  RetentionState state = RetentionState::kClear;  // never kDiscard
  double token_cost = 0.0;
  std::uint64_t insertion_index = 0;

  friend bool operator==(const MemoryEntry&, const MemoryEntry&) = default;
};

// Bounded FIFO of retained frames. Eviction is strictly from the front and
// ignores the retention state of the evicted entries.
class MemoryQueue {
 public:
  explicit MemoryQueue(std::size_t capacity);

  // Appends `entry` (stamping its insertion_index) and returns the ids evicted
  // to bring the queue back within capacity, oldest first. Throws
  // ArgumentError for a kDiscard entry.
  std::vector<std::uint64_t> admit(MemoryEntry entry);

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const std::deque<MemoryEntry>& entries() const noexcept { return entries_; }
  const std::vector<std::uint64_t>& evictions() const noexcept { return evictions_; }
  double token_cost() const noexcept;

 private:
  std::size_t capacity_;
  std::uint64_t next_index_ = 0;
  std::deque<MemoryEntry> entries_;
  std::vector<std::uint64_t> evictions_;
};

}  // namespace curvestream
