#include "cellplan/geometry.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"

using namespace cellplan;
using testutil::brute_line_dist;
using testutil::random_point;

TEST(EuclidDist, IdentityAndTriples) {
  EXPECT_DOUBLE_EQ(euclid_dist({0, 0, 0}, {0, 0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(euclid_dist({0, 0, 0}, {3, 4, 0}), 5.0);
  EXPECT_DOUBLE_EQ(euclid_dist({0, 0, 2.5}, {7, 0, 2.5}), 7.0);
}

TEST(EuclidDist, MetricProperties) {
  std::mt19937 rng(42);
  for (int i = 0; i < 500; ++i) {
    const Point3 a = random_point(rng, -50, 50);
    const Point3 b = random_point(rng, -50, 50);
    const Point3 c = random_point(rng, -50, 50);
    EXPECT_DOUBLE_EQ(euclid_dist(a, b), euclid_dist(b, a));
    EXPECT_GE(euclid_dist(a, b), 0.0);
    const double direct = euclid_dist(a, c);
    const double via = euclid_dist(a, b) + euclid_dist(b, c);
    EXPECT_LE(direct, via * (1.0 + 1e-9) + 1e-9);
  }
}

TEST(HeuristicH, MatchesGoalDistance) {
  EXPECT_DOUBLE_EQ(heuristic_h({1, 2, 2}, {1, 2, 2}), 0.0);
  EXPECT_DOUBLE_EQ(heuristic_h({0, 0, 0}, {1, 2, 2}), 3.0);
  EXPECT_NEAR(heuristic_h({0, 0, 6}, {45, -6, 8}), 45.44, 0.01);
}

TEST(LineDist, PointOnLineIsZero) {
  const LineRef line{{0, 0, 0}, {10, 0, 0}};
  EXPECT_DOUBLE_EQ(line_dist(line.start, line), 0.0);
  EXPECT_DOUBLE_EQ(line_dist({4, 0, 0}, line), 0.0);
  // Infinite line: points beyond the anchors are still on it.
  EXPECT_DOUBLE_EQ(line_dist({-3, 0, 0}, line), 0.0);
  EXPECT_DOUBLE_EQ(line_dist({25, 0, 0}, line), 0.0);
}

TEST(LineDist, KnownPerpendicularDistance) {
  EXPECT_DOUBLE_EQ(line_dist({0.5, 3, 4}, {{0, 0, 0}, {1, 0, 0}}), 5.0);
}

TEST(LineDist, DegenerateAnchorsCollapseToPointDistance) {
  EXPECT_DOUBLE_EQ(line_dist({4, 5, 1}, {{1, 1, 1}, {1, 1, 1}}), 5.0);
}

TEST(LineDist, BoundedByAnchorDistances) {
  std::mt19937 rng(7);
  for (int i = 0; i < 500; ++i) {
    const Point3 p = random_point(rng, -20, 20);
    const LineRef line{random_point(rng, -20, 20), random_point(rng, -20, 20)};
    const double d = line_dist(p, line);
    EXPECT_LE(d, euclid_dist(p, line.start) + 1e-12);
    EXPECT_LE(d, euclid_dist(p, line.goal) + 1e-12);
  }
}

TEST(LineDist, SwapInvariance) {
  std::mt19937 rng(8);
  for (int i = 0; i < 500; ++i) {
    const Point3 p = random_point(rng, -20, 20);
    const Point3 a = random_point(rng, -20, 20);
    const Point3 b = random_point(rng, -20, 20);
    const double d1 = line_dist(p, {a, b});
    const double d2 = line_dist(p, {b, a});
    EXPECT_NEAR(d1, d2, 1e-9 * (1.0 + d1));
  }
}

TEST(LineDist, AgreesWithBruteForceOracle) {
  std::mt19937 rng(123);
  for (int i = 0; i < 1000; ++i) {
    const Point3 p = random_point(rng, -30, 30);
    Point3 a = random_point(rng, -30, 30);
    Point3 b = random_point(rng, -30, 30);
    if (i % 50 == 0) b = a;  // exercise the degenerate rule too
    const LineRef line{a, b};
    EXPECT_NEAR(line_dist(p, line), brute_line_dist(p, line), 1e-6)
        << "case " << i;
  }
}

TEST(HybridHeuristic, Reductions) {
  std::mt19937 rng(9);
  for (int i = 0; i < 200; ++i) {
    const Point3 p = random_point(rng, -20, 20);
    const Point3 s = random_point(rng, -20, 20);
    const Point3 g = random_point(rng, -20, 20);
    EXPECT_DOUBLE_EQ(hybrid_heuristic(p, s, g, 0.0), heuristic_h(p, g));
  }
  EXPECT_DOUBLE_EQ(hybrid_heuristic({1, 2, 3}, {1, 2, 3}, {4, 6, 3}, 0.7),
                   5.0);
}

TEST(HybridHeuristic, WorkedExample) {
  EXPECT_NEAR(hybrid_heuristic({4, 3, 0}, {0, 0, 0}, {10, 0, 0}, 0.5),
              std::sqrt(45.0) + 0.5 * 5.0, 1e-12);
  EXPECT_NEAR(hybrid_heuristic({4, 3, 0}, {0, 0, 0}, {10, 0, 0}, 0.5), 9.2082,
              1e-4);
}

TEST(HybridHeuristic, RejectsWeightOutsideUnitInterval) {
  EXPECT_THROW(hybrid_heuristic({0, 0, 0}, {1, 0, 0}, {2, 0, 0}, -0.1),
               std::invalid_argument);
  EXPECT_THROW(hybrid_heuristic({0, 0, 0}, {1, 0, 0}, {2, 0, 0}, 1.1),
               std::invalid_argument);
  EXPECT_NO_THROW(hybrid_heuristic({0, 0, 0}, {1, 0, 0}, {2, 0, 0}, 0.0));
  EXPECT_NO_THROW(hybrid_heuristic({0, 0, 0}, {1, 0, 0}, {2, 0, 0}, 1.0));
}
