#include "curvestream/strategies.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "curvestream/error.hpp"
#include "curvestream/scorer.hpp"

namespace curvestream {
namespace {

std::vector<std::uint64_t> top_k(std::span<const FrameFeature> stream,
                                 const std::vector<double>& scores, std::size_t budget,
                                 std::optional<double> min_score) {
  std::vector<std::size_t> order;
  order.reserve(stream.size());
  for (std::size_t i = 0; i < stream.size(); ++i) {
    if (min_score && scores[i] < *min_score) continue;
    order.push_back(i);
  }
  const std::size_t k = std::min(budget, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return stream[a].frame_id < stream[b].frame_id;
                    });
  std::vector<std::uint64_t> ids;
  ids.reserve(k);
  for (std::size_t i = 0; i < k; ++i) ids.push_back(stream[order[i]].frame_id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<std::uint64_t> uniform(std::span<const FrameFeature> stream, std::size_t budget,
                                   std::size_t stride) {
  const std::size_t n = stream.size();
  std::vector<std::uint64_t> ids;
  if (stride > 0) {
    for (std::size_t i = 0; i < n && ids.size() < budget; i += stride) {
      ids.push_back(stream[i].frame_id);
    }
    return ids;
  }
  const std::size_t k = std::min(budget, n);
  for (std::size_t i = 0; i < k; ++i) ids.push_back(stream[i * n / k].frame_id);
  return ids;
}

std::vector<std::uint64_t> curvestream_full(const SelectorConfig& config,
                                            std::span<const FrameFeature> stream) {
  EngineConfig engine_config = config.engine;
  engine_config.lambda = config.lambda;
  Engine engine(engine_config);
  for (const FrameFeature& frame : stream) engine.step(frame);
  return queue_selection(engine.queue(), config.budget);
}

}  // namespace

std::vector<std::uint64_t> queue_selection(const MemoryQueue& queue, std::size_t budget) {
  std::vector<std::uint64_t> clear;
  std::vector<std::uint64_t> blurred;
  for (const MemoryEntry& entry : queue.entries()) {
    (entry.state == RetentionState::kClear ? clear : blurred).push_back(entry.frame_id);
  }
  std::vector<std::uint64_t> ids = std::move(clear);
  ids.insert(ids.end(), blurred.begin(), blurred.end());
  if (ids.size() > budget) ids.resize(budget);
  std::sort(ids.begin(), ids.end());
  return ids;
}

SelectorKind parse_selector_kind(std::string_view name) {
  if (name == "uniform" || name == "Uniform") return SelectorKind::kUniform;
  if (name == "cosine" || name == "FirstOrderCosine") return SelectorKind::kFirstOrderCosine;
  if (name == "curvature" || name == "CurvatureTopK") return SelectorKind::kCurvatureTopK;
  if (name == "curvestream" || name == "CurveStreamFull") return SelectorKind::kCurveStreamFull;
  throw ConfigError("unknown selector kind '" + std::string(name) + "'");
}

std::string_view to_string(SelectorKind kind) noexcept {
  switch (kind) {
    case SelectorKind::kUniform:
      return "uniform";
    case SelectorKind::kFirstOrderCosine:
      return "cosine";
    case SelectorKind::kCurvatureTopK:
      return "curvature";
    case SelectorKind::kCurveStreamFull:
      break;
  }
  return "curvestream";
}

std::vector<double> ranking_scores(std::span<const FrameFeature> stream, double lambda) {
  CurvatureScorer scorer(lambda);
  std::vector<double> scores;
  scores.reserve(stream.size());
  for (const FrameFeature& frame : stream) {
    const auto record = scorer.push(frame);
    scores.push_back(record ? record->score : 0.0);
  }
  return scores;
}

std::vector<std::uint64_t> select(const SelectorConfig& config,
                                  std::span<const FrameFeature> stream) {
  if (config.budget == 0) throw ConfigError("selector budget must be >= 1");
  if (stream.empty()) throw ArgumentError("cannot select from an empty stream");
  switch (config.kind) {
    case SelectorKind::kUniform:
      return uniform(stream, config.budget, config.stride);
    case SelectorKind::kFirstOrderCosine:
      return top_k(stream, ranking_scores(stream, 0.0), config.budget, config.cosine_threshold);
    case SelectorKind::kCurvatureTopK:
      return top_k(stream, ranking_scores(stream, config.lambda), config.budget, std::nullopt);
    case SelectorKind::kCurveStreamFull:
      return curvestream_full(config, stream);
  }
  throw ConfigError("unknown selector kind");
}

}  // namespace curvestream
