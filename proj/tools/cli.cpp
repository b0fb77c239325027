#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "curvestream/config.hpp"
#include "curvestream/engine.hpp"
#include "curvestream/error.hpp"
#include "curvestream/evaluator.hpp"
#include "curvestream/feature_io.hpp"
#include "curvestream/simulator.hpp"
#include "curvestream/trace.hpp"
#include "curvestream/version.hpp"

namespace curvestream::cli {
namespace {

namespace fs = std::filesystem;

// Config keys settable from the command line, with their flag spelling.
const std::vector<std::pair<std::string, std::string>> kConfigFlags = {
    {"lambda", "--lambda"},
    {"gamma", "--gamma"},
    {"k1", "--k1"},
    {"k2", "--k2"},
    {"capacity", "--capacity"},
    {"transition_size", "--transition-size"},
    {"high_side", "--high-side"},
    {"cost_high", "--cost-high"},
    {"cost_low", "--cost-low"},
    {"query_frames", "--query-frames"},
};

struct ConfigFlags {
  std::string config_file;
  bool print_config = false;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "Key-value config file (flags override it)");
    app->add_flag("--print-config", print_config, "Print the effective config and exit");
    for (const auto& [key, flag] : kConfigFlags) {
      options[key] = app->add_option(flag, values[key], "Override '" + key + "'");
    }
  }

  // Defaults, then the config file, then explicit flags.
  RunConfig resolve() const {
    RunConfig config;
    if (!config_file.empty()) config = parse_config_file(config_file, config);
    for (const auto& [key, flag] : kConfigFlags) {
      if (options.at(key)->count() > 0) apply_setting(config, key, values.at(key));
    }
    config.engine.validate();
    return config;
  }
};

class DataSink {
 public:
  DataSink(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw IoError("cannot open " + path + " for writing");
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

std::optional<StreamFormat> format_option(const std::string& name) {
  if (name.empty() || name == "auto") return std::nullopt;
  return parse_stream_format(name);
}

std::vector<StepTrace> score_stream(const std::vector<FrameFeature>& frames,
                                    const RunConfig& config) {
  return run_engine(frames, config.engine, config.query_frames);
}

// --- score -----------------------------------------------------------------

struct ScoreArgs {
  ConfigFlags config;
  std::string input;
  std::string format;
  std::string output;
};

int cmd_score(const ScoreArgs& args, std::ostream& out, std::ostream& err) {
  const RunConfig config = args.config.resolve();
  if (args.config.print_config) {
    out << format_config(config);
    return kExitOk;
  }
  if (args.input.empty()) throw ConfigError("score: --input is required");

  const std::vector<FrameFeature> frames = read_stream_file(args.input, format_option(args.format));
  const std::vector<StepTrace> traces = score_stream(frames, config);
  DataSink sink(args.output, out);
  write_trace(sink.get(), traces);

  std::size_t counts[4] = {0, 0, 0, 0};  // clear, blurred, discard, warmup
  for (const StepTrace& t : traces) {
    if (!t.decision) {
      ++counts[3];
    } else if (t.decision->state == RetentionState::kClear) {
      ++counts[0];
    } else if (t.decision->state == RetentionState::kBlurred) {
      ++counts[1];
    } else {
      ++counts[2];
    }
  }
  err << "score: frames=" << traces.size() << " clear=" << counts[0] << " blurred=" << counts[1]
      << " discard=" << counts[2] << " warmup=" << counts[3]
      << " queue=" << (traces.empty() ? 0 : traces.back().queue_len)
      << " tokens=" << format_number(traces.empty() ? 0.0 : traces.back().tokens_total) << '\n';
  return kExitOk;
}

// --- simulate --------------------------------------------------------------

struct SimulateArgs {
  std::string output;
  std::string format;
  std::size_t frames = 500;
  std::size_t dim = 128;
  std::size_t transitions = 5;
  std::string transition_list;
  double drift_step = 0.02;
  double turn_angle = std::numbers::pi / 3.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

int cmd_simulate(const SimulateArgs& args, std::ostream& err) {
  SyntheticSpec spec;
  spec.dimension = args.dim;
  spec.total_frames = args.frames;
  spec.drift_step = args.drift_step;
  spec.turn_angle = args.turn_angle;
  spec.noise_sigma = args.noise_sigma;
  spec.seed = args.seed;
  if (spec.dimension < kMinDimension) throw ConfigError("--dim must be >= 2");
  if (!args.transition_list.empty()) {
    for (std::uint64_t t : parse_id_list(args.transition_list)) spec.transitions.push_back(t);
  } else {
    spec.transitions = place_transitions(args.transitions, args.frames, args.seed);
  }
  spec.validate();

  const LabeledStream stream = generate(spec);
  const StreamFormat format = format_option(args.format).value_or(format_for_path(args.output));
  write_stream_file(stream.frames, args.output, format, spec.dimension);
  write_ground_truth(args.output + ".truth.json", stream.ground_truth);
  {
    std::ofstream meta(args.output + ".sim.json");
    if (!meta) throw IoError("cannot write " + args.output + ".sim.json");
    meta << spec_to_json(spec) << '\n';
  }
  err << "simulate: frames=" << stream.frames.size() << " dim=" << spec.dimension
      << " transitions=" << stream.ground_truth.size() << " -> " << args.output << '\n';
  return kExitOk;
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string stream_dir;
  std::string output;
  std::string run_dir;
  std::string manifest;
  std::string strategies = "curvestream";
  std::string lambdas = "0.2";
  std::string gammas = "0.9";
  std::string k1s = "0";
  std::string k2s = "1";
  std::string capacities = "20";
  std::string budgets = "10";
  std::size_t window = kDefaultMatchWindow;
  unsigned threads = 1;
  double cost_high = 1.0;
  std::string cost_low;
  std::uint32_t high_side = 0;
};

// Integer lists in the order given on the command line.
std::vector<std::size_t> parse_sizes_ordered(const std::string& text) {
  std::vector<std::size_t> out;
  for (double v : parse_number_list(text)) {
    if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
      throw ConfigError("expected non-negative integers, got '" + text + "'");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::vector<EvalStream> load_stream_dir(const std::string& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("stream directory not found: " + dir);
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (ext == ".cvst" || ext == ".bin" || ext == ".jsonl") paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) throw ConfigError("no streams (*.cvst, *.bin, *.jsonl) in " + dir);

  std::vector<EvalStream> streams;
  for (const fs::path& p : paths) {
    EvalStream s;
    s.name = p.filename().string();
    s.path = p.string();
    const std::string truth = s.path + ".truth.json";
    if (!fs::exists(truth)) throw ConfigError("missing ground truth " + truth);
    s.truth = read_ground_truth(truth);
    const std::string sim = s.path + ".sim.json";
    if (fs::exists(sim)) {
      std::ifstream in(sim);
      std::stringstream text;
      text << in.rdbuf();
      s.synthetic = spec_from_json(text.str());
    }
    s.frames = read_stream_file(s.path);
    streams.push_back(std::move(s));
  }
  return streams;
}

int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
  std::vector<EvalStream> streams;
  SweepGrid grid;
  if (!args.manifest.empty()) {
    std::ifstream in(args.manifest);
    if (!in) throw IoError("cannot open manifest " + args.manifest);
    std::stringstream text;
    text << in.rdbuf();
    Manifest m = parse_manifest(text.str());
    grid = m.grid;
    streams = std::move(m.streams);
    for (EvalStream& s : streams) {
      if (!s.path.empty()) {
        s.frames = read_stream_file(s.path);
      } else if (s.synthetic) {
        s.frames = generate(*s.synthetic).frames;
      } else {
        throw FormatError("manifest stream '" + s.name + "' has neither path nor generator");
      }
    }
    if (streams.empty()) throw ConfigError("manifest lists no streams");
  } else {
    if (args.stream_dir.empty()) throw ConfigError("eval: --stream-dir or --manifest is required");
    streams = load_stream_dir(args.stream_dir);
    grid.strategies.clear();
    std::stringstream kinds(args.strategies);
    for (std::string k; std::getline(kinds, k, ',');) {
      grid.strategies.push_back(parse_selector_kind(k));
    }
    grid.lambdas = parse_number_list(args.lambdas);
    grid.gammas = parse_number_list(args.gammas);
    grid.k1s = parse_number_list(args.k1s);
    grid.k2s = parse_number_list(args.k2s);
    grid.capacities = parse_sizes_ordered(args.capacities);
    grid.budgets = parse_sizes_ordered(args.budgets);
    grid.window = args.window;
    grid.base.cost_high = args.cost_high;
    if (!args.cost_low.empty()) grid.base.cost_low = parse_number_list(args.cost_low).at(0);
    grid.base.high_side = args.high_side;
  }
  if (grid.cells_per_stream() == 0) throw ConfigError("eval: empty sweep grid");

  SweepOptions options;
  options.threads = std::max(1u, args.threads);
  if (!args.run_dir.empty()) {
    fs::create_directories(args.run_dir);
    options.trace_dir = args.run_dir;
    std::ofstream manifest(args.run_dir + "/manifest.json");
    if (!manifest) throw IoError("cannot write manifest in " + args.run_dir);
    manifest << manifest_json(streams, grid);
  }

  const EvalReport report = run_sweep(streams, grid, options);
  DataSink sink(args.output, out);
  write_csv(sink.get(), report);

  const auto errored = std::count_if(report.rows.begin(), report.rows.end(),
                                     [](const EvalRow& r) { return !r.ok(); });
  err << "eval: streams=" << streams.size() << " rows=" << report.rows.size()
      << " errored=" << errored << '\n';
  return kExitOk;
}

// --- replay ----------------------------------------------------------------

struct ReplayArgs {
  ConfigFlags config;
  std::string trace;
  std::string input;
  std::string format;
};

int cmd_replay(const ReplayArgs& args, std::ostream& out, std::ostream& err) {
  if (args.trace.empty() || args.input.empty()) {
    throw ConfigError("replay: --trace and --input are required");
  }
  if (!fs::exists(args.trace)) throw ConfigError("replay: trace not found: " + args.trace);
  if (!fs::exists(args.input)) throw ConfigError("replay: stream not found: " + args.input);
  const RunConfig config = args.config.resolve();

  const std::vector<FrameFeature> frames = read_stream_file(args.input, format_option(args.format));
  const std::vector<StepTrace> traces = score_stream(frames, config);

  std::ifstream recorded(args.trace);
  if (!recorded) throw IoError("cannot open " + args.trace);
  std::string line;
  std::size_t line_number = 0;
  for (const StepTrace& t : traces) {
    ++line_number;
    const std::string expected = trace_to_json(t);
    if (!std::getline(recorded, line)) {
      out << "DIVERGE at line " << line_number << "\n  recorded: <missing>\n  expected: "
          << expected << '\n';
      return kExitDivergence;
    }
    if (line != expected) {
      out << "DIVERGE at line " << line_number << "\n  recorded: " << line
          << "\n  expected: " << expected << '\n';
      return kExitDivergence;
    }
  }
  if (std::getline(recorded, line)) {
    out << "DIVERGE at line " << line_number + 1 << "\n  recorded: " << line
        << "\n  expected: <end of trace>\n";
    return kExitDivergence;
  }
  out << "MATCH\n";
  err << "replay: " << line_number << " lines verified\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"curvestream: curvature-aware streaming visual memory", "curvestream"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(0, 1);

  ConfigFlags global;
  global.attach(&app);

  ScoreArgs score;
  CLI::App* score_cmd = app.add_subcommand("score", "Run the memory engine over a feature stream");
  score.config.attach(score_cmd);
  score_cmd->add_option("--input,-i", score.input, "Feature stream (.cvst binary or .jsonl)");
  score_cmd->add_option("--format", score.format, "binary, jsonl or auto (by extension)");
  score_cmd->add_option("--output,-o", score.output, "Trace JSONL path ('-' for stdout)");

  SimulateArgs sim;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Generate a labeled synthetic stream");
  sim_cmd->add_option("--output,-o", sim.output, "Stream path")->required();
  sim_cmd->add_option("--format", sim.format, "binary, jsonl or auto (by extension)");
  sim_cmd->add_option("--frames", sim.frames, "Total frames")->capture_default_str();
  sim_cmd->add_option("--dim", sim.dim, "Feature dimension")->capture_default_str();
  sim_cmd->add_option("--transitions", sim.transitions, "Number of random transitions")
      ->capture_default_str();
  sim_cmd->add_option("--transition-list", sim.transition_list,
                      "Explicit transition indices, comma-separated");
  sim_cmd->add_option("--drift-step", sim.drift_step, "Geodesic step per frame (radians)")
      ->capture_default_str();
  sim_cmd->add_option("--turn-angle", sim.turn_angle, "Direction change at transitions (radians)")
      ->capture_default_str();
  sim_cmd->add_option("--noise-sigma", sim.noise_sigma, "RMS norm of the per-frame noise")
      ->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed, "Random seed")->capture_default_str();

  EvalArgs ev;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Sweep strategies and settings over streams");
  eval_cmd->add_option("--stream-dir", ev.stream_dir, "Directory of streams with .truth.json");
  eval_cmd->add_option("--manifest", ev.manifest, "Rerun a recorded manifest");
  eval_cmd->add_option("--output,-o", ev.output, "CSV report path ('-' for stdout)");
  eval_cmd->add_option("--run-dir", ev.run_dir, "Directory for per-cell traces and manifest");
  eval_cmd->add_option("--strategy", ev.strategies, "uniform,cosine,curvature,curvestream")
      ->capture_default_str();
  eval_cmd->add_option("--lambda", ev.lambdas, "Lambda values")->capture_default_str();
  eval_cmd->add_option("--gamma", ev.gammas, "Momentum values")->capture_default_str();
  eval_cmd->add_option("--k1", ev.k1s, "k1 values")->capture_default_str();
  eval_cmd->add_option("--k2", ev.k2s, "k2 values")->capture_default_str();
  eval_cmd->add_option("--capacity", ev.capacities, "Queue capacities")->capture_default_str();
  eval_cmd->add_option("--budget", ev.budgets, "Selection budgets")->capture_default_str();
  eval_cmd->add_option("--window", ev.window, "Match window in frames")->capture_default_str();
  eval_cmd->add_option("--threads", ev.threads, "Worker threads")->capture_default_str();
  eval_cmd->add_option("--cost-high", ev.cost_high, "Token cost of a Clear frame");
  eval_cmd->add_option("--cost-low", ev.cost_low, "Token cost of a Blurred frame");
  eval_cmd->add_option("--high-side", ev.high_side, "Nominal side of a Clear frame");

  ReplayArgs replay;
  CLI::App* replay_cmd = app.add_subcommand("replay", "Recompute a trace and compare byte-wise");
  replay.config.attach(replay_cmd);
  replay_cmd->add_option("--trace", replay.trace, "Trace produced by 'score'");
  replay_cmd->add_option("--input,-i", replay.input, "Original feature stream");
  replay_cmd->add_option("--format", replay.format, "binary, jsonl or auto (by extension)");

  std::vector<std::string> reversed(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(reversed.begin(), reversed.end());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*score_cmd) return cmd_score(score, out, err);
    if (*sim_cmd) return cmd_simulate(sim, err);
    if (*eval_cmd) return cmd_eval(ev, out, err);
    if (*replay_cmd) return cmd_replay(replay, out, err);
    const RunConfig config = global.resolve();
    if (global.print_config) {
      out << format_config(config);
      return kExitOk;
    }
    out << app.help();
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace curvestream::cli
