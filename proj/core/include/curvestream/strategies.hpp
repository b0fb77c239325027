#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "curvestream/engine.hpp"
#include "curvestream/feature.hpp"

namespace curvestream {

enum class SelectorKind { kUniform, kFirstOrderCosine, kCurvatureTopK, kCurveStreamFull };

// Accepts "uniform", "cosine", "curvature", "curvestream" (and the enum
// spellings "Uniform", "FirstOrderCosine", "CurvatureTopK",
// "CurveStreamFull"). Throws ConfigError otherwise.
SelectorKind parse_selector_kind(std::string_view name);
std::string_view to_string(SelectorKind kind) noexcept;

struct SelectorConfig {
  SelectorKind kind = SelectorKind::kCurvatureTopK;
  std::size_t budget = 10;
  // Uniform: fixed stride between picks; 0 spreads the budget over the stream.
  std::size_t stride = 0;
  // FirstOrderCosine: frames with motion below this are never picked.
  std::optional<double> cosine_threshold;
  // CurvatureTopK and CurveStreamFull.
  double lambda = kDefaultLambda;
  // CurveStreamFull: engine settings (its lambda is overridden by `lambda`).
  EngineConfig engine;
};

// Per-frame ranking scores used by the top-K selectors: motion for
// FirstOrderCosine, motion + lambda * curvature for CurvatureTopK. The first
// frame has no score and ranks as 0.
std::vector<double> ranking_scores(std::span<const FrameFeature> stream, double lambda);

// Final memory contents as a selection: Clear entries first, then Blurred,
// truncated to `budget` and returned in ascending frame id order.
std::vector<std::uint64_t> queue_selection(const MemoryQueue& queue, std::size_t budget);

// Returns at most `budget` frame ids in ascending order. Ties between equal
// scores go to the smaller frame id. Throws ArgumentError for an empty stream
// and ConfigError for a zero budget.
std::vector<std::uint64_t> select(const SelectorConfig& config,
                                  std::span<const FrameFeature> stream);

}  // namespace curvestream
