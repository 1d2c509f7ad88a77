#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "hyfleet/geometry.hpp"
#include "hyfleet/rng.hpp"

using namespace hyfleet;

TEST(Rng, SameSeedSameSequence) {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, BelowStaysInRangeAndHitsEveryValue) {
  Rng r(1);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = r.below(7);
    ASSERT_LT(v, 7u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 7u);
}

TEST(Rng, BetweenInclusive) {
  Rng r(2);
  bool lo = false, hi = false;
  for (int i = 0; i < 1000; ++i) {
    const auto v = r.between(5, 15);
    ASSERT_GE(v, 5);
    ASSERT_LE(v, 15);
    lo |= v == 5;
    hi |= v == 15;
  }
  EXPECT_TRUE(lo && hi);
}

TEST(Rng, Uniform01Range) {
  Rng r(3);
  double sum = 0;
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 10000, 0.5, 0.02);
}

TEST(Rng, DerivedSeedsDiffer) {
  EXPECT_NE(derive_seed(42, {0, 1}), derive_seed(42, {1, 0}));
  EXPECT_NE(derive_seed(42, {0}), derive_seed(43, {0}));
  EXPECT_EQ(derive_seed(42, {3, 4}), derive_seed(42, {3, 4}));
}

TEST(Geometry, SignedAreaAndCentroid) {
  const Polygon sq{{0, 0, 0}, {2, 0, 0}, {2, 2, 0}, {0, 2, 0}};
  EXPECT_DOUBLE_EQ(signed_area(sq), 4.0);
  const Point c = centroid(sq);
  EXPECT_DOUBLE_EQ(c.x, 1.0);
  EXPECT_DOUBLE_EQ(c.y, 1.0);
}

TEST(Geometry, PointInPolygonBoundaryIsInside) {
  const Polygon sq{{0, 0, 0}, {2, 0, 0}, {2, 2, 0}, {0, 2, 0}};
  EXPECT_TRUE(point_in_polygon(sq, {1, 1, 0}));
  EXPECT_TRUE(point_in_polygon(sq, {2, 1, 0}));
  EXPECT_TRUE(point_in_polygon(sq, {0, 0, 0}));
  EXPECT_FALSE(point_in_polygon(sq, {3, 1, 0}));
}

TEST(Geometry, SimplePolygon) {
  const Polygon bowtie{{0, 0, 0}, {2, 2, 0}, {2, 0, 0}, {0, 2, 0}};
  const Polygon sq{{0, 0, 0}, {2, 0, 0}, {2, 2, 0}, {0, 2, 0}};
  EXPECT_FALSE(is_simple_polygon(bowtie));
  EXPECT_TRUE(is_simple_polygon(sq));
}

TEST(Geometry, SegmentsIntersect) {
  EXPECT_TRUE(segments_intersect({0, 0, 0}, {2, 2, 0}, {0, 2, 0}, {2, 0, 0}));
  EXPECT_FALSE(segments_intersect({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}));
  EXPECT_TRUE(segments_intersect({0, 0, 0}, {2, 0, 0}, {2, 0, 0}, {3, 1, 0}));
}
