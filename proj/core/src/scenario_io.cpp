#include <filesystem>

#include "hyfleet/errors.hpp"
#include "hyfleet/scenario.hpp"
#include "json_util.hpp"

namespace hyfleet {

using detail::json;
using detail::Reader;

namespace {

Point read_xy(const Reader& r) {
  if (r.array_size() != 2) Reader::fail(r.path(), "expected [x, y]");
  return {r.at(std::size_t{0}).number(), r.at(1).number(), 0.0};
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  const json doc = detail::parse_json_text(text, "scenario");
  const Reader root(doc, "");

  const Reader nodes = root.at("nodes");
  std::vector<Point> points(nodes.array_size());
  std::vector<char> seen(points.size(), 0);
  for (std::size_t i = 0; i < nodes.array_size(); ++i) {
    const Reader n = nodes.at(i);
    const std::uint32_t id = n.at("id").u32();
    if (id >= points.size()) Reader::fail(n.path() + ".id", "node ids must be dense 0..n-1");
    if (seen[id]) Reader::fail(n.path() + ".id", "duplicate node id");
    seen[id] = 1;
    points[id] = {n.at("x").number(), n.at("y").number(), 0.0};
  }

  const Reader edges = root.at("edges");
  std::vector<RoadEdge> road_edges;
  for (std::size_t i = 0; i < edges.array_size(); ++i) {
    const Reader e = edges.at(i);
    RoadEdge edge{e.at("a").u32(), e.at("b").u32(), e.at("length_m").number(), e.at("speed_mps").number()};
    if (edge.a >= points.size()) Reader::fail(e.path() + ".a", "unknown node");
    if (edge.b >= points.size()) Reader::fail(e.path() + ".b", "unknown node");
    road_edges.push_back(edge);
  }

  Scenario s;
  s.graph = RoadGraph(std::move(points), std::move(road_edges));

  const Reader buildings = root.at("buildings");
  for (std::size_t i = 0; i < buildings.array_size(); ++i) {
    const Reader b = buildings.at(i);
    Building building;
    building.id = b.at("id").u32();
    const Reader fp = b.at("footprint");
    for (std::size_t k = 0; k < fp.array_size(); ++k) building.footprint.push_back(read_xy(fp.at(k)));
    building.height = b.at("height_m").number();
    building.access_point = read_xy(b.at("access"));
    s.buildings.push_back(std::move(building));
  }

  s.depot = root.at("depot").u32();
  const Reader bs = root.at("base_station");
  if (bs.array_size() != 3) Reader::fail(bs.path(), "expected [x, y, z]");
  s.base_station = {bs.at(std::size_t{0}).number(), bs.at(1).number(), bs.at(2).number()};

  validate_scenario(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario(detail::read_text_file(path));
}

std::string dump_scenario(const Scenario& s) {
  json doc;
  json nodes = json::array();
  for (std::size_t i = 0; i < s.graph.node_count(); ++i) {
    const Point& p = s.graph.nodes()[i];
    nodes.push_back({{"id", i}, {"x", p.x}, {"y", p.y}});
  }
  json edges = json::array();
  for (const RoadEdge& e : s.graph.edges()) {
    edges.push_back({{"a", e.a}, {"b", e.b}, {"length_m", e.length}, {"speed_mps", e.speed_limit}});
  }
  json buildings = json::array();
  for (const Building& b : s.buildings) {
    json fp = json::array();
    for (const Point& p : b.footprint) fp.push_back({p.x, p.y});
    buildings.push_back({{"id", b.id},
                         {"footprint", fp},
                         {"height_m", b.height},
                         {"access", {b.access_point.x, b.access_point.y}}});
  }
  doc["nodes"] = std::move(nodes);
  doc["edges"] = std::move(edges);
  doc["buildings"] = std::move(buildings);
  doc["depot"] = s.depot;
  doc["base_station"] = {s.base_station.x, s.base_station.y, s.base_station.z};
  return doc.dump(1) + "\n";
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  detail::write_text_file(path, dump_scenario(s));
}

}  // namespace hyfleet
