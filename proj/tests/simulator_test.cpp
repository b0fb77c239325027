#include "curvestream/simulator.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>

#include "curvestream/error.hpp"
#include "oracles.hpp"

namespace curvestream {
namespace {

SyntheticSpec base_spec() {
  SyntheticSpec s;
  s.dimension = 64;
  s.total_frames = 200;
  s.transitions = {30, 80, 150};
  s.drift_step = 0.02;
  s.turn_angle = std::numbers::pi / 3;
  s.seed = 42;
  return s;
}

double curvature_at(const std::vector<FrameFeature>& f, std::size_t k) {
  return oracle::cosine_distance(oracle::sub(f[k - 1].vector, f[k - 2].vector),
                                 oracle::sub(f[k].vector, f[k - 1].vector));
}

TEST(Simulator, Deterministic) {
  const auto a = generate(base_spec());
  const auto b = generate(base_spec());
  EXPECT_EQ(a.frames, b.frames);
  EXPECT_EQ(a.ground_truth, b.ground_truth);
  auto other = base_spec();
  other.seed = 43;
  EXPECT_NE(generate(other).frames, a.frames);
}

TEST(Simulator, FramesAreUnitNormWithSequentialIds) {
  auto spec = base_spec();
  spec.noise_sigma = 0.01;
  const auto s = generate(spec);
  ASSERT_EQ(s.frames.size(), 200u);
  for (std::size_t i = 0; i < s.frames.size(); ++i) {
    EXPECT_EQ(s.frames[i].frame_id, i);
    EXPECT_EQ(s.frames[i].timestamp, static_cast<double>(i));
    EXPECT_NEAR(oracle::norm(s.frames[i].vector), 1.0, 1e-12);
  }
}

TEST(Simulator, ConstantDriftStep) {
  const auto s = generate(base_spec());
  for (std::size_t k = 1; k < s.frames.size(); ++k) {
    EXPECT_NEAR(oracle::cosine_distance(s.frames[k - 1].vector, s.frames[k].vector),
                1.0 - std::cos(0.02), 1e-12);
  }
}

// Chords of a great circle meet at the step angle, so a noiseless smooth
// stretch has curvature 1 - cos(drift_step) rather than zero.
TEST(Simulator, SmoothCurvatureIsChordTurn) {
  for (double drift : {0.005, 0.01, 0.02, 0.1}) {
    auto spec = base_spec();
    spec.drift_step = drift;
    spec.transitions.clear();
    const auto s = generate(spec);
    for (std::size_t k = 2; k < s.frames.size(); ++k) {
      EXPECT_NEAR(curvature_at(s.frames, k), 1.0 - std::cos(drift), 1e-9) << k;
    }
  }
}

TEST(Simulator, TransitionCurvatureMatchesTurnAngle) {
  for (double turn : {std::numbers::pi / 6, std::numbers::pi / 3, std::numbers::pi / 2,
                      2.0, std::numbers::pi}) {
    auto spec = base_spec();
    spec.turn_angle = turn;
    const auto s = generate(spec);
    for (std::size_t t : spec.transitions) {
      EXPECT_NEAR(curvature_at(s.frames, t), 1.0 - std::cos(turn), 1e-6) << turn;
    }
  }
}

TEST(Simulator, RegimesSeparateWhenTurnExceedsDrift) {
  auto spec = base_spec();
  spec.turn_angle = 0.05;
  const auto s = generate(spec);
  double max_smooth = 0.0;
  double min_transition = 10.0;
  for (std::size_t k = 2; k < s.frames.size(); ++k) {
    const double c = curvature_at(s.frames, k);
    if (std::count(spec.transitions.begin(), spec.transitions.end(), k)) {
      min_transition = std::min(min_transition, c);
    } else {
      max_smooth = std::max(max_smooth, c);
    }
  }
  EXPECT_LT(max_smooth, min_transition);
}

TEST(Simulator, TwoDimensionalReversal) {
  SyntheticSpec spec;
  spec.dimension = 2;
  spec.total_frames = 20;
  spec.transitions = {10};
  spec.turn_angle = std::numbers::pi;
  const auto s = generate(spec);
  EXPECT_NEAR(curvature_at(s.frames, 10), 2.0, 1e-6);
}

TEST(Simulator, ValidationErrors) {
  auto bad = [](auto mutate) {
    SyntheticSpec s = base_spec();
    mutate(s);
    EXPECT_THROW(generate(s), ConfigError);
  };
  bad([](SyntheticSpec& s) { s.dimension = 1; });
  bad([](SyntheticSpec& s) { s.total_frames = 0; });
  bad([](SyntheticSpec& s) { s.drift_step = -0.1; });
  bad([](SyntheticSpec& s) { s.turn_angle = 4.0; });
  bad([](SyntheticSpec& s) { s.noise_sigma = -1; });
  bad([](SyntheticSpec& s) { s.transitions = {2}; });
  bad([](SyntheticSpec& s) { s.transitions = {10, 12}; });
  bad([](SyntheticSpec& s) { s.transitions = {250}; });
  bad([](SyntheticSpec& s) { s.turn_angle = 0.01; });
  bad([](SyntheticSpec& s) {
    s.dimension = 2;
    s.turn_angle = 1.0;
  });
}

TEST(PlaceTransitions, RespectsGapsAndIsDeterministic) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto t = place_transitions(5, 500, seed);
    ASSERT_EQ(t.size(), 5u);
    EXPECT_GE(t.front(), 3u);
    EXPECT_LT(t.back(), 500u);
    for (std::size_t i = 1; i < t.size(); ++i) EXPECT_GE(t[i], t[i - 1] + 4);
    EXPECT_EQ(t, place_transitions(5, 500, seed));
  }
  // Tightest fit: 3, 7, 11.
  EXPECT_EQ(place_transitions(3, 12, 1), (std::vector<std::size_t>{3, 7, 11}));
  EXPECT_THROW(place_transitions(3, 11, 1), ConfigError);
  EXPECT_TRUE(place_transitions(0, 10, 1).empty());
}

TEST(Sidecars, RoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "curvestream_sim_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "truth.json").string();
  write_ground_truth(path, {4, 9, 200});
  EXPECT_EQ(read_ground_truth(path), (std::vector<std::size_t>{4, 9, 200}));

  auto spec = base_spec();
  spec.noise_sigma = 0.003;
  const SyntheticSpec back = spec_from_json(spec_to_json(spec));
  EXPECT_EQ(back.dimension, spec.dimension);
  EXPECT_EQ(back.total_frames, spec.total_frames);
  EXPECT_EQ(back.transitions, spec.transitions);
  EXPECT_EQ(back.drift_step, spec.drift_step);
  EXPECT_EQ(back.turn_angle, spec.turn_angle);
  EXPECT_EQ(back.noise_sigma, spec.noise_sigma);
  EXPECT_EQ(back.seed, spec.seed);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace curvestream
