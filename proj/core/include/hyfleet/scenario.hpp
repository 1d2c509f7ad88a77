#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hyfleet/geometry.hpp"

namespace hyfleet {

using NodeId = std::uint32_t;
using BuildingId = std::uint32_t;

inline constexpr MetersPerSecond kDefaultSpeedLimit = 8.33;

struct RoadEdge {
  NodeId a = 0;
  NodeId b = 0;
  Meters length = 0.0;
  MetersPerSecond speed_limit = kDefaultSpeedLimit;

  friend bool operator==(const RoadEdge&, const RoadEdge&) = default;
};

// Undirected road network. Node ids are dense indices into `nodes`.
class RoadGraph {
 public:
  struct Arc {
    NodeId to;
    std::uint32_t edge;  // index into edges()
  };

  RoadGraph() = default;
  RoadGraph(std::vector<Point> nodes, std::vector<RoadEdge> edges);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Point>& nodes() const { return nodes_; }
  const std::vector<RoadEdge>& edges() const { return edges_; }
  const Point& node(NodeId id) const { return nodes_.at(id); }
  bool has_node(NodeId id) const { return id < nodes_.size(); }

  // Neighbors sorted by node id.
  const std::vector<Arc>& arcs(NodeId id) const { return adjacency_.at(id); }

  // Edge joining u and v, or nullptr if none. With parallel edges the
  // fastest one is returned.
  const RoadEdge* find_edge(NodeId u, NodeId v) const;

  bool connected() const;

  friend bool operator==(const RoadGraph& l, const RoadGraph& r) {
    return l.nodes_ == r.nodes_ && l.edges_ == r.edges_;
  }

 private:
  std::vector<Point> nodes_;
  std::vector<RoadEdge> edges_;
  std::vector<std::vector<Arc>> adjacency_;
};

struct Building {
  BuildingId id = 0;
  Polygon footprint;  // counter-clockwise, z = 0
  Meters height = 0.0;
  Point access_point;  // parcel handover location

  friend bool operator==(const Building&, const Building&) = default;
};

struct Scenario {
  RoadGraph graph;
  std::vector<Building> buildings;
  NodeId depot = 0;
  Point base_station;  // z is the antenna height

  const Building& building(BuildingId id) const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Throws InvariantError naming the first violated invariant.
void validate_scenario(const Scenario& scenario);

struct GridParams {
  std::uint32_t rows = 8;
  std::uint32_t cols = 8;
  Meters spacing = 100.0;
  std::uint32_t buildings_per_cell = 2;
  std::uint64_t seed = 42;
};

// rows x cols lattice with node id = row * cols + col at (col, row) * spacing.
// Buildings are placed inside cell interiors, one horizontal strip per
// building so footprints in a cell never overlap.
Scenario generate_grid_scenario(const GridParams& params);

// Smallest id wins ties.
NodeId nearest_node(const Scenario& scenario, const Point& p);

// True iff segment a-b touches any building volume (footprint extruded from
// z = 0 to its height). Symmetric in a and b.
bool los_blocked(const Scenario& scenario, const Point& a, const Point& b);

Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& text);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);
std::string dump_scenario(const Scenario& scenario);

}  // namespace hyfleet
