#include "curvestream/evaluator.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <ostream>
#include <thread>

#include "curvestream/config.hpp"
#include "curvestream/error.hpp"
#include "curvestream/trace.hpp"
#include "curvestream/version.hpp"
#include "json.hpp"

namespace curvestream {
namespace {

using Json = nlohmann::ordered_json;

struct Cell {
  std::size_t stream;
  SelectorKind strategy;
  double lambda;
  double gamma;
  double k1;
  double k2;
  std::size_t capacity;
  std::size_t budget;
};

std::vector<Cell> enumerate_cells(std::size_t stream_count, const SweepGrid& g) {
  std::vector<Cell> cells;
  cells.reserve(stream_count * g.cells_per_stream());
  for (std::size_t s = 0; s < stream_count; ++s)
    for (SelectorKind kind : g.strategies)
      for (double lambda : g.lambdas)
        for (double gamma : g.gammas)
          for (double k1 : g.k1s)
            for (double k2 : g.k2s)
              for (std::size_t capacity : g.capacities)
                for (std::size_t budget : g.budgets)
                  cells.push_back({s, kind, lambda, gamma, k1, k2, capacity, budget});
  return cells;
}

EvalRow run_cell(const Cell& cell, const EvalStream& stream, const SweepGrid& grid,
                 const SweepOptions& options, std::size_t row_index) {
  EvalRow row;
  row.stream = stream.name;
  row.strategy = cell.strategy;
  row.lambda = cell.lambda;
  row.gamma = cell.gamma;
  row.k1 = cell.k1;
  row.k2 = cell.k2;
  row.capacity = cell.capacity;
  row.budget = cell.budget;
  row.window = grid.window;

  try {
    EngineConfig config = grid.base;
    config.lambda = cell.lambda;
    config.gamma = cell.gamma;
    config.k1 = cell.k1;
    config.k2 = cell.k2;
    config.capacity = cell.capacity;
    config.validate();
    if (cell.budget == 0) throw ConfigError("budget must be >= 1");
    if (stream.frames.empty()) throw ArgumentError("stream is empty");

    std::vector<std::uint64_t> selected;
    if (cell.strategy == SelectorKind::kCurveStreamFull) {
      Engine engine(config);
      std::vector<std::uint64_t> clear_ids;
      std::vector<StepTrace> traces;
      for (const FrameFeature& frame : stream.frames) {
        StepTrace t = engine.step(frame);
        if (t.decision && t.decision->state == RetentionState::kClear &&
            !t.decision->forced_by_query) {
          clear_ids.push_back(t.frame_id);
        }
        if (options.trace_dir) traces.push_back(std::move(t));
      }
      selected = queue_selection(engine.queue(), cell.budget);
      const EngineStats& stats = engine.stats();
      row.mean_queue_len = stats.mean_queue_len();
      row.clear_ratio = stats.clear_ratio();
      row.total_tokens = stats.tokens_total;
      row.clear = stats.clear;
      row.blurred = stats.blurred;
      row.discard = stats.discard;
      row.clear_recall = transition_recall(clear_ids, stream.truth, grid.window).recall;

      if (options.trace_dir) {
        const std::string path =
            *options.trace_dir + "/cell_" + std::to_string(row_index) + ".jsonl";
        std::ofstream out(path);
        if (!out) throw IoError("cannot open " + path);
        write_trace(out, traces);
      }
    } else {
      SelectorConfig sc;
      sc.kind = cell.strategy;
      sc.budget = cell.budget;
      sc.lambda = cell.lambda;
      sc.engine = config;
      selected = select(sc, stream.frames);
      // Baselines keep every selected frame at full resolution.
      row.mean_queue_len = static_cast<double>(selected.size());
      row.clear_ratio = selected.empty() ? 0.0 : 1.0;
      row.total_tokens = static_cast<double>(selected.size()) * config.cost_high;
      row.clear = selected.size();
      row.discard = stream.frames.size() - selected.size();
    }
    row.selected = selected.size();
    row.recall = transition_recall(selected, stream.truth, grid.window);
    if (cell.strategy != SelectorKind::kCurveStreamFull) row.clear_recall = row.recall.recall;
  } catch (const IoError&) {
    throw;
  } catch (const Error& e) {
    row.error = e.what();
  }
  return row;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

RecallResult transition_recall(std::span<const std::uint64_t> selected,
                               std::span<const std::size_t> truth, std::size_t window) {
  RecallResult result;
  std::size_t j = 0;
  for (std::size_t t : truth) {
    const std::uint64_t lo = t >= window ? t - window : 0;
    while (j < selected.size() && selected[j] < lo) ++j;
    if (j < selected.size() && selected[j] <= t + window) {
      ++result.matched;
      ++j;
    }
  }
  result.recall_defined = !truth.empty();
  result.precision_defined = !selected.empty();
  result.recall = result.recall_defined
                      ? static_cast<double>(result.matched) / static_cast<double>(truth.size())
                      : 0.0;
  result.precision = result.precision_defined ? static_cast<double>(result.matched) /
                                                    static_cast<double>(selected.size())
                                              : 0.0;
  return result;
}

std::size_t SweepGrid::cells_per_stream() const noexcept {
  return strategies.size() * lambdas.size() * gammas.size() * k1s.size() * k2s.size() *
         capacities.size() * budgets.size();
}

EvalReport run_sweep(std::span<const EvalStream> streams, const SweepGrid& grid,
                     const SweepOptions& options) {
  if (streams.empty()) throw ConfigError("no streams to evaluate");
  if (grid.cells_per_stream() == 0) throw ConfigError("empty sweep grid");

  const std::vector<Cell> cells = enumerate_cells(streams.size(), grid);
  EvalReport report;
  report.rows.resize(cells.size());

  const unsigned workers =
      std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(cells.size())));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(workers);
  auto work = [&](unsigned worker) {
    try {
      for (std::size_t i = next++; i < cells.size(); i = next++) {
        report.rows[i] = run_cell(cells[i], streams[cells[i].stream], grid, options, i);
      }
    } catch (...) {
      failures[worker] = std::current_exception();
      next = cells.size();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return report;
}

std::string csv_header() {
  return "stream,strategy,lambda,gamma,k1,k2,capacity,budget,window,status,recall,precision,"
         "precision_defined,selected,mean_queue_len,clear_ratio,total_tokens,clear,blurred,"
         "discard,clear_recall";
}

void write_csv(std::ostream& out, const EvalReport& report) {
  out << "# curvestream-eval-csv v1\n" << csv_header() << '\n';
  for (const EvalRow& r : report.rows) {
    out << csv_escape(r.stream) << ',' << to_string(r.strategy) << ','
        << format_number(r.lambda) << ',' << format_number(r.gamma) << ','
        << format_number(r.k1) << ',' << format_number(r.k2) << ',' << r.capacity << ','
        << r.budget << ',' << r.window << ',';
    if (!r.ok()) {
      out << csv_escape("error: " + r.error) << ",,,,,,,,,,,\n";
      continue;
    }
    out << "ok," << format_number(r.recall.recall) << ',' << format_number(r.recall.precision)
        << ',' << (r.recall.precision_defined ? 1 : 0) << ',' << r.selected << ','
        << format_number(r.mean_queue_len) << ',' << format_number(r.clear_ratio) << ','
        << format_number(r.total_tokens) << ',' << r.clear << ',' << r.blurred << ','
        << r.discard << ',' << format_number(r.clear_recall) << '\n';
  }
  out.flush();
  if (!out) throw IoError("CSV write failed");
}

std::string manifest_json(std::span<const EvalStream> streams, const SweepGrid& grid) {
  Json j;
  j["schema"] = "curvestream-eval-manifest/1";
  j["version"] = std::string(version());
  Json s = Json::array();
  for (const EvalStream& stream : streams) {
    Json e;
    e["name"] = stream.name;
    e["path"] = stream.path;
    e["frames"] = stream.frames.size();
    e["truth"] = stream.truth;
    e["synthetic"] = stream.synthetic ? Json::parse(spec_to_json(*stream.synthetic)) : Json();
    s.push_back(std::move(e));
  }
  j["streams"] = std::move(s);

  Json g;
  Json kinds = Json::array();
  for (SelectorKind k : grid.strategies) kinds.push_back(std::string(to_string(k)));
  g["strategies"] = std::move(kinds);
  g["lambda"] = grid.lambdas;
  g["gamma"] = grid.gammas;
  g["k1"] = grid.k1s;
  g["k2"] = grid.k2s;
  g["capacity"] = grid.capacities;
  g["budget"] = grid.budgets;
  g["window"] = grid.window;
  g["transition_size"] = grid.base.transition_size;
  g["high_side"] = grid.base.high_side;
  g["cost_high"] = grid.base.cost_high;
  g["cost_low"] = grid.base.cost_low ? Json(*grid.base.cost_low) : Json();
  j["grid"] = std::move(g);
  return j.dump(2) + "\n";
}

Manifest parse_manifest(const std::string& text) {
  const Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw FormatError("manifest is not a JSON object");
  try {
    Manifest m;
    for (const Json& e : j.at("streams")) {
      EvalStream s;
      s.name = e.at("name").get<std::string>();
      s.path = e.at("path").get<std::string>();
      s.truth = e.at("truth").get<std::vector<std::size_t>>();
      if (!e.at("synthetic").is_null()) s.synthetic = spec_from_json(e.at("synthetic").dump());
      m.streams.push_back(std::move(s));
    }
    const Json& g = j.at("grid");
    m.grid.strategies.clear();
    for (const Json& k : g.at("strategies")) {
      m.grid.strategies.push_back(parse_selector_kind(k.get<std::string>()));
    }
    m.grid.lambdas = g.at("lambda").get<std::vector<double>>();
    m.grid.gammas = g.at("gamma").get<std::vector<double>>();
    m.grid.k1s = g.at("k1").get<std::vector<double>>();
    m.grid.k2s = g.at("k2").get<std::vector<double>>();
    m.grid.capacities = g.at("capacity").get<std::vector<std::size_t>>();
    m.grid.budgets = g.at("budget").get<std::vector<std::size_t>>();
    m.grid.window = g.at("window").get<std::size_t>();
    m.grid.base.transition_size = g.at("transition_size").get<std::uint32_t>();
    m.grid.base.high_side = g.at("high_side").get<std::uint32_t>();
    m.grid.base.cost_high = g.at("cost_high").get<double>();
    if (!g.at("cost_low").is_null()) m.grid.base.cost_low = g.at("cost_low").get<double>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("manifest: ") + e.what());
  }
}

}  // namespace curvestream
