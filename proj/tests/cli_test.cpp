#include "cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "curvestream/feature_io.hpp"
#include "curvestream/simulator.hpp"
#include "curvestream/strategies.hpp"
#include "json.hpp"

namespace curvestream {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "curvestream");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("curvestream_cli_" + std::string(
                                      ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string simulate(const std::string& name, std::vector<std::string> extra = {}) {
    std::vector<std::string> args = {"simulate", "-o", path(name)};
    args.insert(args.end(), extra.begin(), extra.end());
    const Result r = run(args);
    EXPECT_EQ(r.code, 0) << r.err;
    return path(name);
  }

  fs::path dir_;
};

TEST_F(CliTest, PrintConfigShowsDefaults) {
  const Result r = run({"--print-config"});
  EXPECT_EQ(r.code, 0);
  for (const char* line : {"capacity = 20", "lambda = 0.2", "k1 = 0", "k2 = 1",
                           "transition_size = 224"}) {
    EXPECT_NE(r.out.find(line), std::string::npos) << line;
  }
  const Result s = run({"score", "--lambda", "0.5", "--print-config"});
  EXPECT_NE(s.out.find("lambda = 0.5"), std::string::npos);
}

TEST_F(CliTest, ScoreWritesOneTraceLinePerFrame) {
  const std::string stream = simulate("s.cvst", {"--frames", "100", "--dim", "32"});
  const Result r = run({"score", "--input", stream, "--output", path("t.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = lines_of(slurp(path("t.jsonl")));
  ASSERT_EQ(lines.size(), 100u);
  for (const auto& line : lines) {
    EXPECT_LE(nlohmann::json::parse(line)["queue_len"].get<int>(), 20);
  }
  EXPECT_NE(r.err.find("frames=100"), std::string::npos);
}

TEST_F(CliTest, ScoreToStdout) {
  const std::string stream = simulate("s.jsonl", {"--frames", "30", "--dim", "4"});
  const Result r = run({"score", "-i", stream});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines_of(r.out).size(), 30u);
}

TEST_F(CliTest, InvalidThresholdOrderIsConfigError) {
  const std::string stream = simulate("s.cvst", {"--frames", "20", "--dim", "8"});
  const Result r = run({"score", "--input", stream, "--k1", "1.0", "--k2", "0.5"});
  EXPECT_EQ(r.code, cli::kExitConfig);
  EXPECT_NE(r.err.find("k1 must be less than k2"), std::string::npos) << r.err;
}

TEST_F(CliTest, UnitCapacityKeepsOneFrame) {
  const std::string stream = simulate("s.cvst", {"--frames", "50", "--dim", "8"});
  const Result r = run({"score", "-i", stream, "-o", path("t.jsonl"), "--capacity", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = lines_of(slurp(path("t.jsonl")));
  EXPECT_EQ(nlohmann::json::parse(lines.back())["queue_len"], 1);
}

TEST_F(CliTest, MissingInputFileIsIoError) {
  EXPECT_EQ(run({"score", "-i", path("nope.cvst")}).code, cli::kExitIo);
}

TEST_F(CliTest, UnknownOptionIsConfigError) {
  EXPECT_EQ(run({"score", "--bogus"}).code, cli::kExitConfig);
}

TEST_F(CliTest, ConfigFileAndFlagPrecedence) {
  {
    std::ofstream cfg(path("run.cfg"));
    cfg << "lambda = 0.7\ncapacity = 3\n";
  }
  const Result r = run({"score", "--config", path("run.cfg"), "--capacity", "4", "--print-config"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("lambda = 0.7"), std::string::npos);
  EXPECT_NE(r.out.find("capacity = 4"), std::string::npos);
}

TEST_F(CliTest, SimulateIsDeterministic) {
  const std::string a = simulate("a.cvst", {"--seed", "9", "--frames", "200"});
  const std::string b = simulate("b.cvst", {"--seed", "9", "--frames", "200"});
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_EQ(slurp(a + ".truth.json"), slurp(b + ".truth.json"));
  EXPECT_EQ(read_ground_truth(a + ".truth.json").size(), 5u);
  const std::string c = simulate("c.cvst", {"--seed", "10", "--frames", "200"});
  EXPECT_NE(slurp(a), slurp(c));
}

TEST_F(CliTest, SimulateRejectsBadDimension) {
  EXPECT_EQ(run({"simulate", "-o", path("x.cvst"), "--dim", "1"}).code, cli::kExitConfig);
}

TEST_F(CliTest, NoiselessTopScoresSitOnTransitions) {
  const std::string stream = simulate("s.cvst", {"--seed", "3", "--noise-sigma", "0"});
  const auto truth = read_ground_truth(stream + ".truth.json");
  const auto frames = read_stream_file(stream);
  SelectorConfig c;
  c.kind = SelectorKind::kCurvatureTopK;
  c.budget = truth.size();
  const auto picked = select(c, frames);
  ASSERT_EQ(picked.size(), truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    EXPECT_LE(std::abs(static_cast<long long>(picked[i]) - static_cast<long long>(truth[i])), 1);
  }
}

TEST_F(CliTest, EvalLambdaSweep) {
  fs::create_directories(path("streams"));
  simulate("streams/a.cvst", {"--seed", "1", "--frames", "200", "--dim", "32"});
  const Result r = run({"eval", "--stream-dir", path("streams"), "--strategy", "curvature",
                        "--lambda", "0.2,0.4,0.6,0.8,1.0", "-o", path("r.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = lines_of(slurp(path("r.csv")));
  ASSERT_EQ(lines.size(), 2u + 5u);
  for (std::size_t i = 2; i < lines.size(); ++i) EXPECT_NE(lines[i].find(",ok,"), std::string::npos);
}

TEST_F(CliTest, EvalEmptyDirectoryIsConfigError) {
  fs::create_directories(path("empty"));
  EXPECT_EQ(run({"eval", "--stream-dir", path("empty")}).code, cli::kExitConfig);
}

TEST_F(CliTest, EvalManifestRerunIsByteIdentical) {
  fs::create_directories(path("streams"));
  simulate("streams/a.cvst", {"--seed", "1", "--frames", "150", "--dim", "16"});
  simulate("streams/b.jsonl", {"--seed", "2", "--frames", "150", "--dim", "16"});
  Result r = run({"eval", "--stream-dir", path("streams"), "--strategy", "uniform,curvestream",
                  "--k2", "1,2", "--run-dir", path("run1"), "-o", path("first.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(path("run1/manifest.json")));
  EXPECT_TRUE(fs::exists(path("run1/cell_2.jsonl")));
  r = run({"eval", "--manifest", path("run1/manifest.json"), "--run-dir", path("run2"), "-o",
           path("second.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(path("first.csv")), slurp(path("second.csv")));
  EXPECT_EQ(slurp(path("run1/manifest.json")), slurp(path("run2/manifest.json")));
  EXPECT_EQ(slurp(path("run1/cell_2.jsonl")), slurp(path("run2/cell_2.jsonl")));
}

TEST_F(CliTest, ReplayDetectsTampering) {
  const std::string stream = simulate("s.cvst", {"--frames", "60", "--dim", "16"});
  ASSERT_EQ(run({"score", "-i", stream, "-o", path("t.jsonl")}).code, 0);

  Result r = run({"replay", "--trace", path("t.jsonl"), "--input", stream});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "MATCH\n");

  auto lines = lines_of(slurp(path("t.jsonl")));
  auto j = nlohmann::ordered_json::parse(lines[29]);
  j["CS"] = j["CS"].get<double>() + 1e-6;
  lines[29] = j.dump();
  {
    std::ofstream out(path("bad.jsonl"));
    for (const auto& l : lines) out << l << '\n';
  }
  r = run({"replay", "--trace", path("bad.jsonl"), "--input", stream});
  EXPECT_EQ(r.code, cli::kExitDivergence);
  EXPECT_EQ(r.out.rfind("DIVERGE at line 30", 0), 0u) << r.out;

  r = run({"replay", "--trace", path("t.jsonl"), "--input", stream, "--gamma", "0.5"});
  EXPECT_EQ(r.code, cli::kExitDivergence);
  EXPECT_EQ(r.out.rfind("DIVERGE at line 2", 0), 0u) << r.out;
}

TEST_F(CliTest, ReplayMissingTraceIsConfigError) {
  const std::string stream = simulate("s.cvst", {"--frames", "30", "--dim", "4"});
  EXPECT_EQ(run({"replay", "--trace", path("none.jsonl"), "--input", stream}).code,
            cli::kExitConfig);
}

}  // namespace
}  // namespace curvestream
