#include "curvestream/engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "curvestream/error.hpp"

namespace curvestream {
namespace {

bool finite_non_negative(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

double EngineConfig::effective_cost_low() const noexcept {
  if (cost_low) return *cost_low;
  if (high_side > 0) {
    const double ratio = static_cast<double>(transition_size) / high_side;
    return ratio * ratio;
  }
  return 0.25;
}

void EngineConfig::validate() const {
  if (!finite_non_negative(lambda)) throw ConfigError("lambda must be finite and >= 0");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1)");
  if (!std::isfinite(k1) || !std::isfinite(k2)) throw ConfigError("k1 and k2 must be finite");
  if (!(k1 < k2)) {
    throw ConfigError("k1 must be less than k2 (got k1=" + std::to_string(k1) +
                      ", k2=" + std::to_string(k2) + ")");
  }
  if (capacity < 1) throw ConfigError("capacity must be >= 1");
  if (transition_size < 1) throw ConfigError("transition_size must be >= 1");
  if (!finite_non_negative(cost_high)) throw ConfigError("cost_high must be finite and >= 0");
  if (!finite_non_negative(effective_cost_low())) {
    throw ConfigError("cost_low must be finite and >= 0");
  }
}

double EngineStats::clear_ratio() const noexcept {
  const std::uint64_t admitted = clear + blurred;
  return admitted == 0 ? 0.0 : static_cast<double>(clear) / static_cast<double>(admitted);
}

double EngineStats::mean_queue_len() const noexcept {
  return steps == 0 ? 0.0 : static_cast<double>(queue_len_sum) / static_cast<double>(steps);
}

Engine::Engine(EngineConfig config)
    : config_((config.validate(), config)),
      scorer_(config_.lambda),
      queue_(config_.capacity) {
  distribution_.momentum = config_.gamma;
}

StepTrace Engine::step(const FrameFeature& frame, bool is_query_frame) {
  if (last_id_ && frame.frame_id <= *last_id_) {
    throw SequencingError("frame_id " + std::to_string(frame.frame_id) +
                          " arrived after " + std::to_string(*last_id_));
  }

  StepTrace trace;
  trace.frame_id = frame.frame_id;
  trace.timestamp = frame.timestamp;
  trace.score = scorer_.push(frame);
  last_id_ = frame.frame_id;

  if (trace.score) {
    distribution_ = update_distribution(distribution_, trace.score->score);
    trace.thresholds = thresholds_from(distribution_, config_.k1, config_.k2);
    const Route r = route(trace.score->score, *trace.thresholds, is_query_frame);
    RetentionDecision decision;
    decision.frame_id = frame.frame_id;
    decision.state = r.state;
    decision.resolution = r.resolution;
    decision.thresholds = *trace.thresholds;
    decision.score = trace.score->score;
    decision.forced_by_query = is_query_frame;
    trace.decision = decision;
  } else if (is_query_frame) {
    // A query on the unscored first frame is still retained as Clear.
    RetentionDecision decision;
    decision.frame_id = frame.frame_id;
    decision.state = RetentionState::kClear;
    decision.resolution = Resolution::kHigh;
    decision.forced_by_query = true;
    trace.decision = decision;
  }
  trace.distribution = distribution_;

  ++stats_.steps;
  if (!trace.decision) {
    ++stats_.warmup;
  } else {
    RetentionDecision& decision = *trace.decision;
    if (decision.forced_by_query) ++stats_.forced;
    switch (decision.state) {
      case RetentionState::kClear:
        decision.token_cost = config_.cost_high;
        ++stats_.clear;
        break;
      case RetentionState::kBlurred:
        decision.token_cost = config_.effective_cost_low();
        ++stats_.blurred;
        break;
      case RetentionState::kDiscard:
        decision.token_cost = 0.0;
        ++stats_.discard;
        break;
    }
    if (decision.state != RetentionState::kDiscard) {
      trace.evicted = queue_.admit({frame.frame_id, decision.state, decision.token_cost, 0});
      stats_.tokens_total += decision.token_cost;
    }
  }
  trace.queue_len = queue_.size();
  trace.tokens_total = stats_.tokens_total;
  stats_.queue_len_sum += trace.queue_len;
  return trace;
}

StepTrace Engine::push(std::span<const double> raw, bool is_query_frame) {
  FrameFeature frame;
  frame.frame_id = last_id_ ? *last_id_ + 1 : 0;
  frame.timestamp = static_cast<double>(frame.frame_id);
  frame.vector.assign(raw.begin(), raw.end());
  normalize(frame.vector, frame.frame_id);
  return step(frame, is_query_frame);
}

std::vector<StepTrace> run_engine(std::span<const FrameFeature> frames,
                                  const EngineConfig& config,
                                  std::span<const std::uint64_t> query_frames) {
  const std::unordered_set<std::uint64_t> queries(query_frames.begin(), query_frames.end());
  Engine engine(config);
  std::vector<StepTrace> traces;
  traces.reserve(frames.size());
  for (const FrameFeature& frame : frames) {
    traces.push_back(engine.step(frame, queries.contains(frame.frame_id)));
  }
  return traces;
}

}  // namespace curvestream
