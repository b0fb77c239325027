#include "curvestream/memory.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "curvestream/error.hpp"
#include "curvestream/rng.hpp"
#include "oracles.hpp"

namespace curvestream {
namespace {

DistributionState fresh(double gamma) {
  DistributionState d;
  d.momentum = gamma;
  return d;
}

TEST(Distribution, FirstUpdateFromZero) {
  const auto d = update_distribution(fresh(0.9), 1.0);
  EXPECT_NEAR(d.mean, 0.1, 1e-15);
  EXPECT_NEAR(d.variance, 0.081, 1e-15);
  EXPECT_EQ(d.observations, 1u);
}

TEST(Distribution, RejectsInvalidScores) {
  EXPECT_THROW(update_distribution(fresh(0.9), -0.1), ArgumentError);
  EXPECT_THROW(update_distribution(fresh(0.9), std::nan("")), ArgumentError);
  EXPECT_THROW(update_distribution(fresh(0.9), INFINITY), ArgumentError);
}

TEST(Distribution, ConstantStreamConvergesToZeroVariance) {
  for (double gamma : {0.5, 0.9, 0.99}) {
    std::vector<double> scores(400, 0.3);
    const auto expected = oracle::ema_recursion(scores, gamma);
    auto d = fresh(gamma);
    for (std::size_t i = 0; i < scores.size(); ++i) {
      d = update_distribution(d, scores[i]);
      EXPECT_NEAR(d.mean, static_cast<double>(expected[i].mean), 1e-13);
      EXPECT_NEAR(d.variance, static_cast<double>(expected[i].variance), 1e-13);
    }
    if (gamma < 0.99) {
      EXPECT_NEAR(d.mean, 0.3, 1e-10);
      EXPECT_NEAR(d.variance, 0.0, 1e-10);
    }
  }
}

TEST(Distribution, MatchesOracleOnRandomScores) {
  Rng rng(17);
  for (double gamma : {0.0, 0.3, 0.9, 0.999}) {
    std::vector<double> scores(1000);
    for (double& s : scores) s = 2.4 * rng.uniform();
    const auto expected = oracle::ema_recursion(scores, gamma);
    auto d = fresh(gamma);
    for (std::size_t i = 0; i < scores.size(); ++i) {
      d = update_distribution(d, scores[i]);
      const auto mean = static_cast<double>(expected[i].mean);
      const auto var = static_cast<double>(expected[i].variance);
      EXPECT_LE(std::abs(d.mean - mean), 1e-12 * std::max(1e-3, std::abs(mean)));
      EXPECT_LE(std::abs(d.variance - var), 1e-12 * std::max(1e-3, std::abs(var)));
    }
  }
}

TEST(Distribution, UsesUpdatedMeanInVariance) {
  // A single spike separates the two orderings clearly.
  std::vector<double> scores(50, 0.1);
  scores[25] = 1.5;
  const auto right = oracle::ema_recursion(scores, 0.9, true);
  const auto wrong = oracle::ema_recursion(scores, 0.9, false);
  auto d = fresh(0.9);
  for (double s : scores) d = update_distribution(d, s);
  EXPECT_NEAR(d.variance, static_cast<double>(right.back().variance), 1e-14);
  EXPECT_GT(std::abs(d.variance - static_cast<double>(wrong.back().variance)), 1e-6);
}

TEST(Thresholds, WorkedExamples) {
  DistributionState d = fresh(0.9);
  d.mean = 0.5;
  d.variance = 0.01;
  auto th = thresholds_from(d, 0.0, 1.0);
  EXPECT_NEAR(th.g1, 0.5, 1e-15);
  EXPECT_NEAR(th.g2, 0.6, 1e-15);

  d.variance = 0.0;
  th = thresholds_from(d, 0.0, 1.0);
  EXPECT_EQ(th.g1, th.g2);

  d.mean = 0.4;
  d.variance = 0.25;
  th = thresholds_from(d, 1.0, 2.0);
  EXPECT_NEAR(th.g1, 0.9, 1e-15);
  EXPECT_NEAR(th.g2, 1.4, 1e-15);
  EXPECT_EQ(th.k1, 1.0);
  EXPECT_EQ(th.k2, 2.0);
}

TEST(Thresholds, RequireStrictOrder) {
  EXPECT_THROW(thresholds_from(fresh(0.9), 1.0, 1.0), ConfigError);
  try {
    thresholds_from(fresh(0.9), 2.0, 1.0);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("k1"), std::string::npos);
  }
}

TEST(Routing, BoundariesAreInclusive) {
  const Thresholds th{0.5, 0.6, 0.0, 1.0};
  EXPECT_EQ(route(0.6, th, false).state, RetentionState::kClear);
  EXPECT_EQ(route(0.5, th, false).state, RetentionState::kBlurred);
  EXPECT_EQ(route(0.55, th, false).state, RetentionState::kBlurred);
  EXPECT_EQ(route(0.4999, th, false).state, RetentionState::kDiscard);
  EXPECT_EQ(route(0.0, th, true).state, RetentionState::kClear);
  EXPECT_EQ(route(0.6, th, false).resolution, Resolution::kHigh);
  EXPECT_EQ(route(0.5, th, false).resolution, Resolution::kLow);
  EXPECT_EQ(route(0.1, th, false).resolution, Resolution::kNone);
}

TEST(Routing, RandomDrawsPartitionAndAreMonotone) {
  Rng rng(23);
  for (int trial = 0; trial < 1000; ++trial) {
    const double g1 = rng.uniform();
    const double g2 = g1 + rng.uniform() * 0.5;
    const Thresholds th{g1, g2, 0.0, 1.0};
    const double a = rng.uniform() * 1.6;
    const double b = rng.uniform() * 1.6;
    const auto ra = route(a, th, false).state;
    const RetentionState expected = a >= g2   ? RetentionState::kClear
                                    : a >= g1 ? RetentionState::kBlurred
                                              : RetentionState::kDiscard;
    EXPECT_EQ(ra, expected);
    if (a <= b) {
      EXPECT_LE(static_cast<int>(ra), static_cast<int>(route(b, th, false).state));
    }
    EXPECT_EQ(route(a, th, true).state, RetentionState::kClear);
  }
}

TEST(Queue, AdmitExamples) {
  MemoryQueue q(3);
  for (std::uint64_t id = 0; id < 3; ++id) {
    EXPECT_TRUE(q.admit({id, RetentionState::kBlurred, 0.25, 0}).empty());
  }
  const auto evicted = q.admit({3, RetentionState::kClear, 1.0, 0});
  EXPECT_EQ(evicted, (std::vector<std::uint64_t>{0}));
  ASSERT_EQ(q.size(), 3u);
  EXPECT_EQ(q.entries().front().frame_id, 1u);
  EXPECT_EQ(q.entries().back().insertion_index, 3u);
  EXPECT_DOUBLE_EQ(q.token_cost(), 1.5);
}

TEST(Queue, EvictionIgnoresState) {
  MemoryQueue q(2);
  q.admit({0, RetentionState::kClear, 1.0, 0});
  q.admit({1, RetentionState::kBlurred, 0.25, 0});
  EXPECT_EQ(q.admit({2, RetentionState::kBlurred, 0.25, 0}),
            (std::vector<std::uint64_t>{0}));
}

TEST(Queue, RejectsDiscardAndZeroCapacity) {
  EXPECT_THROW(MemoryQueue(0), ConfigError);
  MemoryQueue q(1);
  EXPECT_THROW(q.admit({0, RetentionState::kDiscard, 0.0, 0}), ArgumentError);
}

TEST(Queue, MatchesFifoReplay) {
  for (std::size_t capacity : {1u, 5u, 20u}) {
    Rng rng(capacity);
    MemoryQueue q(capacity);
    std::vector<std::uint64_t> admitted;
    std::vector<std::uint64_t> evicted;
    for (std::uint64_t id = 0; id < 100000; ++id) {
      if (rng.uniform() < 0.4) continue;
      const auto state = rng.uniform() < 0.5 ? RetentionState::kClear : RetentionState::kBlurred;
      admitted.push_back(id);
      for (auto e : q.admit({id, state, 1.0, 0})) evicted.push_back(e);
      ASSERT_LE(q.size(), capacity);
    }
    const auto expected = oracle::fifo_replay(admitted, capacity);
    ASSERT_EQ(q.size(), expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
      EXPECT_EQ(q.entries()[i].frame_id, expected[i]);
    }
    // Every admitted frame is either still queued or was evicted, in order.
    ASSERT_EQ(evicted.size() + q.size(), admitted.size());
    for (std::size_t i = 0; i < evicted.size(); ++i) EXPECT_EQ(evicted[i], admitted[i]);
    EXPECT_EQ(q.evictions(), evicted);
  }
}

}  // namespace
}  // namespace curvestream
