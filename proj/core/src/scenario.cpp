#include "hyfleet/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "hyfleet/errors.hpp"
#include "hyfleet/rng.hpp"

namespace hyfleet {

RoadGraph::RoadGraph(std::vector<Point> nodes, std::vector<RoadEdge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), adjacency_(nodes_.size()) {
  for (std::uint32_t i = 0; i < edges_.size(); ++i) {
    const RoadEdge& e = edges_[i];
    if (e.a >= nodes_.size() || e.b >= nodes_.size()) {
      throw InvariantError("edge " + std::to_string(i) + " references unknown node");
    }
    adjacency_[e.a].push_back({e.b, i});
    if (e.a != e.b) adjacency_[e.b].push_back({e.a, i});
  }
  for (auto& arcs : adjacency_) {
    std::sort(arcs.begin(), arcs.end(), [](const Arc& l, const Arc& r) {
      return l.to != r.to ? l.to < r.to : l.edge < r.edge;
    });
  }
}

const RoadEdge* RoadGraph::find_edge(NodeId u, NodeId v) const {
  const RoadEdge* best = nullptr;
  for (const Arc& arc : adjacency_.at(u)) {
    if (arc.to != v) continue;
    const RoadEdge& e = edges_[arc.edge];
    if (best == nullptr || e.length / e.speed_limit < best->length / best->speed_limit) best = &e;
  }
  return best;
}

bool RoadGraph::connected() const {
  if (nodes_.empty()) return true;
  std::vector<char> seen(nodes_.size(), 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    for (const Arc& arc : adjacency_[u]) {
      if (!seen[arc.to]) {
        seen[arc.to] = 1;
        ++count;
        stack.push_back(arc.to);
      }
    }
  }
  return count == nodes_.size();
}

const Building& Scenario::building(BuildingId id) const {
  for (const Building& b : buildings) {
    if (b.id == id) return b;
  }
  throw ScenarioError("unknown building " + std::to_string(id));
}

void validate_scenario(const Scenario& s) {
  const RoadGraph& g = s.graph;
  if (g.node_count() == 0) throw InvariantError("graph has no nodes");
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const Point& p = g.nodes()[i];
    if (!is_finite(p)) throw InvariantError("node " + std::to_string(i) + " has non-finite coordinates");
    if (p.z != 0.0) throw InvariantError("node " + std::to_string(i) + " is not on the ground (z != 0)");
  }
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    const RoadEdge& e = g.edges()[i];
    const std::string tag = "edge " + std::to_string(i);
    if (e.a == e.b) throw InvariantError(tag + " is a self-loop");
    if (!(e.speed_limit > 0.0) || !std::isfinite(e.speed_limit)) {
      throw InvariantError(tag + " speed_limit must be > 0");
    }
    const Meters euclid = distance2d(g.node(e.a), g.node(e.b));
    if (!std::isfinite(e.length) || e.length < euclid - 1e-9 * std::max(1.0, euclid)) {
      throw InvariantError(tag + " length shorter than endpoint distance");
    }
  }
  if (!g.connected()) throw InvariantError("graph not connected");
  if (!g.has_node(s.depot)) throw InvariantError("depot does not exist in graph");
  if (!is_finite(s.base_station) || !(s.base_station.z > 0.0)) {
    throw InvariantError("base_station height must be > 0");
  }
  std::vector<BuildingId> ids;
  for (const Building& b : s.buildings) {
    const std::string tag = "building " + std::to_string(b.id);
    ids.push_back(b.id);
    if (b.footprint.size() < 3) throw InvariantError(tag + " footprint needs at least 3 vertices");
    for (const Point& p : b.footprint) {
      if (!is_finite(p)) throw InvariantError(tag + " footprint has non-finite coordinates");
    }
    if (!is_simple_polygon(b.footprint)) throw InvariantError(tag + " footprint is not simple");
    if (signed_area(b.footprint) <= 0.0) throw InvariantError(tag + " footprint is not counter-clockwise");
    if (!(b.height > 0.0) || !std::isfinite(b.height)) throw InvariantError(tag + " height must be > 0");
    if (!is_finite(b.access_point)) throw InvariantError(tag + " access point is non-finite");
    if (distance2d(b.access_point, centroid(b.footprint)) > 50.0) {
      throw InvariantError(tag + " access point farther than 50 m from footprint centroid");
    }
    if (point_in_polygon(b.footprint, g.node(s.depot))) {
      throw InvariantError(tag + " contains the depot node");
    }
  }
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw InvariantError("building ids are not unique");
  }
}

Scenario generate_grid_scenario(const GridParams& p) {
  if (p.rows < 2 || p.cols < 2) throw ParameterError("grid needs rows >= 2 and cols >= 2");
  if (!(p.spacing > 0.0) || !std::isfinite(p.spacing)) throw ParameterError("grid spacing must be > 0");

  std::vector<Point> nodes;
  nodes.reserve(static_cast<std::size_t>(p.rows) * p.cols);
  for (std::uint32_t r = 0; r < p.rows; ++r) {
    for (std::uint32_t c = 0; c < p.cols; ++c) nodes.push_back({c * p.spacing, r * p.spacing, 0.0});
  }
  std::vector<RoadEdge> edges;
  for (std::uint32_t r = 0; r < p.rows; ++r) {
    for (std::uint32_t c = 0; c < p.cols; ++c) {
      const NodeId id = r * p.cols + c;
      if (c + 1 < p.cols) edges.push_back({id, id + 1, p.spacing, kDefaultSpeedLimit});
      if (r + 1 < p.rows) edges.push_back({id, id + p.cols, p.spacing, kDefaultSpeedLimit});
    }
  }

  Scenario s;
  s.graph = RoadGraph(std::move(nodes), std::move(edges));
  s.depot = 0;
  s.base_station = {(p.cols - 1) * p.spacing / 2.0, (p.rows - 1) * p.spacing / 2.0, 30.0};

  // Setback from the roads, then one strip per building along y.
  Rng rng(p.seed);
  const double setback = 0.1 * p.spacing;
  const double inner = p.spacing - 2.0 * setback;
  const double strip = p.buildings_per_cell > 0 ? inner / p.buildings_per_cell : 0.0;
  constexpr double kMaxSide = 40.0;
  BuildingId next_id = 0;
  for (std::uint32_t r = 0; r + 1 < p.rows; ++r) {
    for (std::uint32_t c = 0; c + 1 < p.cols; ++c) {
      const double x0 = c * p.spacing + setback;
      for (std::uint32_t k = 0; k < p.buildings_per_cell; ++k) {
        const double y0 = r * p.spacing + setback + k * strip;
        const double width = std::min(kMaxSide, rng.uniform(0.3, 0.8) * inner);
        const double depth = std::min(kMaxSide, rng.uniform(0.3, 0.8) * strip);
        const double bx = x0 + rng.uniform(0.0, inner - width);
        const double by = y0 + rng.uniform(0.0, strip - depth);
        const double height = rng.uniform(6.0, 24.0);

        Building b;
        b.id = next_id++;
        b.footprint = {{bx, by, 0.0}, {bx + width, by, 0.0}, {bx + width, by + depth, 0.0}, {bx, by + depth, 0.0}};
        b.height = height;
        // Handover on the facade closest to a road.
        const double cx = bx + width / 2.0;
        const double cy = by + depth / 2.0;
        const double gaps[4] = {bx - c * p.spacing, (c + 1) * p.spacing - (bx + width), by - r * p.spacing,
                                (r + 1) * p.spacing - (by + depth)};
        const auto side = std::min_element(std::begin(gaps), std::end(gaps)) - std::begin(gaps);
        switch (side) {
          case 0: b.access_point = {bx, cy, 0.0}; break;
          case 1: b.access_point = {bx + width, cy, 0.0}; break;
          case 2: b.access_point = {cx, by, 0.0}; break;
          default: b.access_point = {cx, by + depth, 0.0}; break;
        }
        s.buildings.push_back(std::move(b));
      }
    }
  }
  return s;
}

NodeId nearest_node(const Scenario& scenario, const Point& p) {
  const auto& nodes = scenario.graph.nodes();
  if (nodes.empty()) throw ParameterError("nearest_node on an empty graph");
  NodeId best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (NodeId i = 0; i < nodes.size(); ++i) {
    const double dx = nodes[i].x - p.x;
    const double dy = nodes[i].y - p.y;
    const double d2 = dx * dx + dy * dy;
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

namespace {

bool segment_hits_building(const Building& b, const Point& a, const Point& c) {
  // Parameter range where the segment lies within [0, height].
  double t0 = 0.0;
  double t1 = 1.0;
  const double dz = c.z - a.z;
  if (dz == 0.0) {
    if (a.z < 0.0 || a.z > b.height) return false;
  } else {
    double ta = (0.0 - a.z) / dz;
    double tb = (b.height - a.z) / dz;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  const Point p = lerp(a, c, t0);
  const Point q = lerp(a, c, t1);

  double min_x = b.footprint[0].x, max_x = min_x, min_y = b.footprint[0].y, max_y = min_y;
  for (const Point& v : b.footprint) {
    min_x = std::min(min_x, v.x);
    max_x = std::max(max_x, v.x);
    min_y = std::min(min_y, v.y);
    max_y = std::max(max_y, v.y);
  }
  if (std::max(p.x, q.x) < min_x || std::min(p.x, q.x) > max_x || std::max(p.y, q.y) < min_y ||
      std::min(p.y, q.y) > max_y) {
    return false;
  }
  if (point_in_polygon(b.footprint, p) || point_in_polygon(b.footprint, q)) return true;
  const std::size_t n = b.footprint.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (segments_intersect(p, q, b.footprint[i], b.footprint[(i + 1) % n])) return true;
  }
  return false;
}

bool lex_less(const Point& l, const Point& r) {
  if (l.x != r.x) return l.x < r.x;
  if (l.y != r.y) return l.y < r.y;
  return l.z < r.z;
}

}  // namespace

bool los_blocked(const Scenario& scenario, const Point& a, const Point& b) {
  // Canonical endpoint order makes the floating-point path identical both ways.
  const Point& lo = lex_less(b, a) ? b : a;
  const Point& hi = lex_less(b, a) ? a : b;
  for (const Building& building : scenario.buildings) {
    if (segment_hits_building(building, lo, hi)) return true;
  }
  return false;
}

}  // namespace hyfleet
