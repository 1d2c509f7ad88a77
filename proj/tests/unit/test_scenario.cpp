#include <gtest/gtest.h>

#include <filesystem>
#include <cmath>

#include "fixtures.hpp"
#include "hyfleet/errors.hpp"
#include "hyfleet/scenario.hpp"

using namespace hyfleet;
using hyfleet::testing::box_building;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "hyfleet_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

Scenario grid(std::uint32_t rows, std::uint32_t cols, double spacing, std::uint32_t per_cell, std::uint64_t seed) {
  return generate_grid_scenario({rows, cols, spacing, per_cell, seed});
}

}  // namespace

TEST(GridScenario, TwoByTwoWithoutBuildings) {
  const Scenario s = grid(2, 2, 100, 0, 1);
  EXPECT_EQ(s.graph.node_count(), 4u);
  EXPECT_EQ(s.graph.edge_count(), 4u);
  EXPECT_TRUE(s.buildings.empty());
  EXPECT_EQ(s.depot, 0u);
  EXPECT_EQ(s.graph.node(s.depot).x, 0.0);
  EXPECT_EQ(s.graph.node(s.depot).y, 0.0);
}

TEST(GridScenario, ThreeByThreeOneBuildingPerCell) {
  const Scenario s = grid(3, 3, 100, 1, 7);
  EXPECT_EQ(s.graph.node_count(), 9u);
  EXPECT_EQ(s.graph.edge_count(), 12u);
  EXPECT_EQ(s.buildings.size(), 4u);
  EXPECT_DOUBLE_EQ(s.base_station.z, 30.0);
  EXPECT_DOUBLE_EQ(s.base_station.x, 100.0);
  EXPECT_DOUBLE_EQ(s.base_station.y, 100.0);
}

TEST(GridScenario, Deterministic) {
  EXPECT_EQ(dump_scenario(grid(5, 5, 100, 2, 42)), dump_scenario(grid(5, 5, 100, 2, 42)));
  EXPECT_NE(dump_scenario(grid(5, 5, 100, 2, 42)), dump_scenario(grid(5, 5, 100, 2, 43)));
}

TEST(GridScenario, InvalidDimensions) {
  EXPECT_THROW(grid(1, 3, 100, 1, 1), ParameterError);
  EXPECT_THROW(grid(3, 3, 0, 1, 1), ParameterError);
  EXPECT_THROW(grid(3, 3, -5, 1, 1), ParameterError);
}

TEST(GridScenario, InvariantsHoldForRandomSeeds) {
  Rng rng(99);
  for (int i = 0; i < 60; ++i) {
    const auto rows = static_cast<std::uint32_t>(rng.between(2, 9));
    const auto cols = static_cast<std::uint32_t>(rng.between(2, 9));
    const auto per_cell = static_cast<std::uint32_t>(rng.between(0, 4));
    const Scenario s = grid(rows, cols, rng.uniform(20, 300), per_cell, rng.next_u64());
    ASSERT_NO_THROW(validate_scenario(s)) << "iteration " << i;
    EXPECT_EQ(s.buildings.size(), static_cast<std::size_t>((rows - 1) * (cols - 1) * per_cell));
    for (const Building& b : s.buildings) {
      EXPECT_GE(b.height, 6.0);
      EXPECT_LE(b.height, 24.0);
      // Footprints stay strictly inside their cell, clear of the roads.
      const double spacing = s.graph.node(1).x;
      for (const Point& p : b.footprint) {
        EXPECT_GT(std::fmod(p.x, spacing), 0.0);
        EXPECT_GT(std::fmod(p.y, spacing), 0.0);
      }
    }
  }
}

TEST(NearestNode, Examples) {
  const Scenario s = grid(2, 2, 100, 0, 1);
  EXPECT_EQ(nearest_node(s, {10, 5, 0}), 0u);
  EXPECT_EQ(nearest_node(s, {100, 100, 0}), 3u);
}

TEST(NearestNode, TieGoesToSmallestId) {
  // Nodes 3 and 5 are both 10 m from p; everything else is farther.
  Scenario s;
  s.graph = RoadGraph({{0, 0, 0}, {100, 0, 0}, {200, 0, 0}, {300, 0, 0}, {300, 100, 0}, {320, 0, 0}},
                      {{0, 1, 100}, {1, 2, 100}, {2, 3, 100}, {3, 4, 100}, {3, 5, 20}});
  EXPECT_EQ(nearest_node(s, {310, 0, 0}), 3u);
  EXPECT_EQ(nearest_node(s, {320, 0, 0}), 5u);
}

TEST(NearestNode, ExhaustiveAgainstBruteForce) {
  const Scenario s = grid(4, 5, 70, 0, 3);
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    const Point p{rng.uniform(-50, 350), rng.uniform(-50, 260), 0};
    const NodeId n = nearest_node(s, p);
    const double best = distance2d(s.graph.node(n), p);
    for (NodeId k = 0; k < s.graph.node_count(); ++k) {
      const double d = distance2d(s.graph.node(k), p);
      ASSERT_LE(best, d);
      if (d == best) ASSERT_LE(n, k);
    }
  }
}

TEST(LosBlocked, Examples) {
  Scenario s = hyfleet::testing::line_scenario(3, 100);
  EXPECT_FALSE(los_blocked(s, {0, 0, 1.5}, {200, 0, 1.5}));
  s.buildings.push_back(box_building(0, 80, -10, 120, 10, 10, {100, 12, 0}));
  EXPECT_TRUE(los_blocked(s, {0, 0, 1.5}, {200, 0, 1.5}));
  EXPECT_FALSE(los_blocked(s, {0, 0, 50}, {200, 0, 50}));
  // Endpoint inside the volume.
  EXPECT_TRUE(los_blocked(s, {100, 0, 5}, {100, 200, 5}));
  // Passes beside the building.
  EXPECT_FALSE(los_blocked(s, {0, 20, 1.5}, {200, 20, 1.5}));
  // Climbs over the roof.
  EXPECT_FALSE(los_blocked(s, {0, 0, 12}, {200, 0, 40}));
  EXPECT_TRUE(los_blocked(s, {0, 0, 1}, {200, 0, 20}));
}

TEST(LosBlocked, SymmetricOnGeneratedScenario) {
  const Scenario s = grid(5, 5, 100, 2, 11);
  Rng rng(12);
  int blocked = 0;
  for (int i = 0; i < 3000; ++i) {
    const Point a{rng.uniform(0, 400), rng.uniform(0, 400), rng.uniform(0, 60)};
    const Point b{rng.uniform(0, 400), rng.uniform(0, 400), rng.uniform(0, 60)};
    const bool ab = los_blocked(s, a, b);
    ASSERT_EQ(ab, los_blocked(s, b, a));
    blocked += ab;
  }
  EXPECT_GT(blocked, 0);
}

TEST(ScenarioIo, RoundTrip) {
  const Scenario s = grid(3, 3, 100, 1, 7);
  const auto path = temp_file("roundtrip.json");
  save_scenario(s, path);
  EXPECT_EQ(load_scenario(path), s);
  EXPECT_EQ(parse_scenario(dump_scenario(s)), s);
}

TEST(ScenarioIo, RoundTripRandom) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Scenario s = grid(4, 3, 50 + seed, 2, seed);
    EXPECT_EQ(parse_scenario(dump_scenario(s)), s);
  }
}

TEST(ScenarioIo, DisconnectedGraph) {
  const std::string text = R"({
    "nodes": [{"id": 0, "x": 0, "y": 0}, {"id": 1, "x": 100, "y": 0}, {"id": 2, "x": 500, "y": 0}],
    "edges": [{"a": 0, "b": 1, "length_m": 100, "speed_mps": 8.33}],
    "buildings": [], "depot": 0, "base_station": [0, 0, 30]})";
  try {
    parse_scenario(text);
    FAIL() << "expected an invariant error";
  } catch (const InvariantError& e) {
    EXPECT_NE(std::string(e.what()).find("graph not connected"), std::string::npos);
  }
}

TEST(ScenarioIo, EdgeShorterThanEndpoints) {
  const std::string text = R"({
    "nodes": [{"id": 0, "x": 0, "y": 0}, {"id": 1, "x": 100, "y": 0}],
    "edges": [{"a": 0, "b": 1, "length_m": 90, "speed_mps": 8.33}],
    "buildings": [], "depot": 0, "base_station": [0, 0, 30]})";
  EXPECT_THROW(parse_scenario(text), InvariantError);
}

TEST(ScenarioIo, ParseErrorsCarryLocation) {
  try {
    parse_scenario("{\n  \"nodes\": [\n   {\"id\": 0,, }\n]}");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  try {
    parse_scenario(R"({"nodes": [{"id": 0, "x": "a", "y": 0}], "edges": [], "buildings": [], "depot": 0,
                      "base_station": [0, 0, 30]})");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("nodes[0].x"), std::string::npos) << e.what();
  }
}

TEST(ScenarioIo, AccessPointTooFar) {
  Scenario s = hyfleet::testing::line_scenario(3, 100);
  s.buildings.push_back(box_building(0, 80, 20, 120, 40, 10, {100, 200, 0}));
  EXPECT_THROW(validate_scenario(s), InvariantError);
}

TEST(ScenarioIo, BuildingOverDepot) {
  Scenario s = hyfleet::testing::line_scenario(3, 100);
  s.buildings.push_back(box_building(0, -10, -10, 10, 10, 10, {0, 12, 0}));
  EXPECT_THROW(validate_scenario(s), InvariantError);
}
