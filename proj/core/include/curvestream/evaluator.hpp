#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "curvestream/engine.hpp"
#include "curvestream/feature.hpp"
#include "curvestream/simulator.hpp"
#include "curvestream/strategies.hpp"

namespace curvestream {

inline constexpr std::size_t kDefaultMatchWindow = 1;

struct RecallResult {
  double recall = 0.0;
  double precision = 0.0;
  std::size_t matched = 0;
  bool recall_defined = true;     // false when truth is empty
  bool precision_defined = true;  // false when nothing was selected
};

// Greedy one-to-one matching in ascending order: each truth index takes the
// smallest unmatched selected id within +-window. Undefined ratios are
// reported as 0 with the corresponding flag cleared. Both inputs must be
// sorted ascending.
RecallResult transition_recall(std::span<const std::uint64_t> selected,
                               std::span<const std::size_t> truth, std::size_t window);

struct EvalStream {
  std::string name;
  std::string path;  // empty for in-memory streams
  std::vector<FrameFeature> frames;
  std::vector<std::size_t> truth;
  std::optional<SyntheticSpec> synthetic;
};

// Cartesian grid. Cells are enumerated stream-major, then strategy, lambda,
// gamma, k1, k2, capacity, budget.
struct SweepGrid {
  std::vector<SelectorKind> strategies = {SelectorKind::kCurveStreamFull};
  std::vector<double> lambdas = {kDefaultLambda};
  std::vector<double> gammas = {kDefaultMomentum};
  std::vector<double> k1s = {0.0};
  std::vector<double> k2s = {1.0};
  std::vector<std::size_t> capacities = {20};
  std::vector<std::size_t> budgets = {10};
  std::size_t window = kDefaultMatchWindow;
  // Token costs and resolution settings shared by every cell.
  EngineConfig base;

  std::size_t cells_per_stream() const noexcept;
};

struct EvalRow {
  std::string stream;
  SelectorKind strategy = SelectorKind::kCurveStreamFull;
  double lambda = 0.0;
  double gamma = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  std::size_t capacity = 0;
  std::size_t budget = 0;
  std::size_t window = 0;
  std::string error;  // empty when the cell ran

  RecallResult recall;
  std::size_t selected = 0;
  double mean_queue_len = 0.0;
  double clear_ratio = 0.0;
  double total_tokens = 0.0;
  std::uint64_t clear = 0;
  std::uint64_t blurred = 0;
  std::uint64_t discard = 0;
  // Recall of every frame the engine routed Clear during the run (engine
  // strategy only; baselines repeat `recall`).
  double clear_recall = 0.0;

  bool ok() const noexcept { return error.empty(); }
};

struct EvalReport {
  std::vector<EvalRow> rows;
};

struct SweepOptions {
  unsigned threads = 1;
  // When set, every engine cell writes its JSONL trace to
  // <trace_dir>/cell_<row index>.jsonl.
  std::optional<std::string> trace_dir;
};

// Runs every (stream, cell) combination. Invalid cells become errored rows;
// the sweep continues. Row order is the grid order regardless of threads.
// Throws ConfigError for an empty grid or no streams.
EvalReport run_sweep(std::span<const EvalStream> streams, const SweepGrid& grid,
                     const SweepOptions& options = {});

// CSV with a leading "# curvestream-eval-csv v1" line and a fixed header.
void write_csv(std::ostream& out, const EvalReport& report);
std::string csv_header();

// Manifest capturing streams (paths, truth, generator specs and seeds) and the
// full grid, enough to rerun the sweep byte-identically.
std::string manifest_json(std::span<const EvalStream> streams, const SweepGrid& grid);

struct Manifest {
  std::vector<EvalStream> streams;  // frames not loaded
  SweepGrid grid;
};
Manifest parse_manifest(const std::string& text);

}  // namespace curvestream
