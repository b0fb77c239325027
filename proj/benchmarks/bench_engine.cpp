#include <benchmark/benchmark.h>

#include <vector>

#include "curvestream/engine.hpp"
#include "curvestream/memory.hpp"
#include "curvestream/scorer.hpp"
#include "curvestream/simulator.hpp"

namespace {

using namespace curvestream;

std::vector<FrameFeature> stream(std::size_t dim, std::size_t frames) {
  SyntheticSpec spec;
  spec.dimension = dim;
  spec.total_frames = frames;
  spec.transitions = place_transitions(frames / 100, frames, 1);
  spec.noise_sigma = 0.005;
  spec.seed = 1;
  return generate(spec).frames;
}

void BM_ScorerPush(benchmark::State& state) {
  const auto frames = stream(static_cast<std::size_t>(state.range(0)), 1000);
  CurvatureScorer scorer;
  std::uint64_t id = 0;
  std::size_t i = 0;
  for (auto _ : state) {
    FrameFeature f = frames[i];
    f.frame_id = id++;
    benchmark::DoNotOptimize(scorer.push(f));
    i = (i + 1) % frames.size();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ScorerPush)->Arg(128)->Arg(768)->Arg(4096);

void BM_EngineStream(benchmark::State& state) {
  const auto frames = stream(static_cast<std::size_t>(state.range(0)), 1000);
  for (auto _ : state) {
    Engine engine(EngineConfig{});
    for (const auto& f : frames) benchmark::DoNotOptimize(engine.step(f));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(frames.size()));
}
BENCHMARK(BM_EngineStream)->Arg(128)->Arg(768);

void BM_QueueAdmit(benchmark::State& state) {
  MemoryQueue queue(static_cast<std::size_t>(state.range(0)));
  std::uint64_t id = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(queue.admit({id++, RetentionState::kClear, 1.0, 0}));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_QueueAdmit)->Arg(1)->Arg(20)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
