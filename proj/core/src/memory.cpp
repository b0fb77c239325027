#include "curvestream/memory.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "curvestream/error.hpp"

namespace curvestream {

DistributionState update_distribution(const DistributionState& dist, double score) {
  if (!std::isfinite(score) || score < 0.0) {
    throw ArgumentError("score must be finite and >= 0");
  }
  const double gamma = dist.momentum;
  DistributionState next = dist;
  next.mean = gamma * dist.mean + (1.0 - gamma) * score;
  const double deviation = score - next.mean;
  next.variance = gamma * dist.variance + (1.0 - gamma) * deviation * deviation;
  if (next.variance < 0.0) next.variance = 0.0;
  ++next.observations;
  return next;
}

Thresholds thresholds_from(const DistributionState& dist, double k1, double k2) {
  if (!(k1 < k2)) {
    throw ConfigError("k1 must be less than k2 (got k1=" + std::to_string(k1) +
                      ", k2=" + std::to_string(k2) + ")");
  }
  const double sigma = std::sqrt(dist.variance);
  return {dist.mean + k1 * sigma, dist.mean + k2 * sigma, k1, k2};
}

std::string_view to_string(RetentionState state) noexcept {
  switch (state) {
    case RetentionState::kClear:
      return "Clear";
    case RetentionState::kBlurred:
      return "Blurred";
    case RetentionState::kDiscard:
      break;
  }
  return "Discard";
}

Route route(double score, const Thresholds& th, bool is_query_frame) noexcept {
  RetentionState state = RetentionState::kDiscard;
  if (is_query_frame || score >= th.g2) {
    state = RetentionState::kClear;
  } else if (score >= th.g1) {
    state = RetentionState::kBlurred;
  }
  return {state, resolution_for(state)};
}

MemoryQueue::MemoryQueue(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("queue capacity must be >= 1");
}

std::vector<std::uint64_t> MemoryQueue::admit(MemoryEntry entry) {
  if (entry.state == RetentionState::kDiscard) {
    throw ArgumentError("discarded frames never enter the memory queue");
  }
  entry.insertion_index = next_index_++;
  entries_.push_back(entry);
  std::vector<std::uint64_t> evicted;
  while (entries_.size() > capacity_) {
    evicted.push_back(entries_.front().frame_id);
    evictions_.push_back(entries_.front().frame_id);
    entries_.pop_front();
  }
  return evicted;
}

double MemoryQueue::token_cost() const noexcept {
  return std::accumulate(entries_.begin(), entries_.end(), 0.0,
                         [](double acc, const MemoryEntry& e) { return acc + e.token_cost; });
}

}  // namespace curvestream
