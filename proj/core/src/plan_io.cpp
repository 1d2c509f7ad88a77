#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "hyfleet/errors.hpp"
#include "hyfleet/hybrid.hpp"
#include "serialization.hpp"

namespace hyfleet {

using detail::json;
using detail::Reader;

namespace {

bool near(double a, double b, double tol = 1e-6) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

}  // namespace

std::vector<std::string> check_plan(const HybridPlan& plan, const Scenario& scenario) {
  std::vector<std::string> v;
  const FleetConfig& f = plan.fleet;
  const TruckSchedule& t = plan.truck;
  const RoadGraph& g = scenario.graph;
  auto fail = [&](std::string msg) { v.push_back(std::move(msg)); };

  std::map<JobId, const DeliveryJob*> jobs;
  for (const DeliveryJob& j : plan.jobs) jobs[j.id] = &j;

  std::map<JobId, int> served;
  for (JobId id : t.stops) ++served[id];
  for (const Sortie& s : plan.sorties) ++served[s.job];
  for (const auto& [id, job] : jobs) {
    if (served[id] != 1) fail("job " + std::to_string(id) + " served " + std::to_string(served[id]) + " times");
  }
  for (const auto& [id, count] : served) {
    if (!jobs.count(id)) fail("unknown job " + std::to_string(id) + " in plan");
  }

  if (t.visits.empty()) {
    fail("truck has no visits");
    return v;
  }
  if (t.visits.front().node != scenario.depot || t.visits.front().arrive != 0.0) fail("truck does not start at depot at t=0");
  if (t.visits.back().node != scenario.depot) fail("truck does not return to depot");
  for (std::size_t i = 0; i < t.visits.size(); ++i) {
    const TruckVisit& vis = t.visits[i];
    if (!g.has_node(vis.node)) {
      fail("visit " + std::to_string(i) + " at unknown node");
      continue;
    }
    if (vis.depart < vis.arrive) fail("visit " + std::to_string(i) + " departs before arriving");
    if (i == 0) continue;
    const RoadEdge* e = g.has_node(t.visits[i - 1].node) ? g.find_edge(t.visits[i - 1].node, vis.node) : nullptr;
    if (e == nullptr) {
      fail("visits " + std::to_string(i - 1) + "->" + std::to_string(i) + " not adjacent");
    } else if (!near(vis.arrive, t.visits[i - 1].depart + edge_time(*e, f.truck_speed))) {
      fail("visit " + std::to_string(i) + " arrival inconsistent with edge travel time");
    }
  }
  if (t.service_index.size() != t.stops.size()) fail("service_index size mismatch");
  for (std::size_t k = 0; k < std::min(t.stops.size(), t.service_index.size()); ++k) {
    const std::size_t idx = t.service_index[k];
    if (idx >= t.visits.size()) {
      fail("stop " + std::to_string(k) + " served at unknown visit");
      continue;
    }
    auto it = jobs.find(t.stops[k]);
    if (it != jobs.end() && t.visits[idx].node != nearest_node(scenario, it->second->target)) {
      fail("job " + std::to_string(t.stops[k]) + " served away from its road node");
    }
    if (k > 0 && idx < t.service_index[k - 1]) fail("truck stops served out of order");
  }

  std::map<DroneId, const Sortie*> last;
  for (const Sortie& s : plan.sorties) {
    const std::string tag = "sortie for job " + std::to_string(s.job);
    if (s.drone >= f.drone_count) fail(tag + " uses drone " + std::to_string(s.drone) + " beyond fleet");
    if (s.launch_index >= t.visits.size() || s.rendezvous_index >= t.visits.size()) {
      fail(tag + " references unknown visit");
      continue;
    }
    if (s.rendezvous_index <= s.launch_index) fail(tag + " rendezvous not after launch on the truck path");
    const TruckVisit& lv = t.visits[s.launch_index];
    const TruckVisit& rv = t.visits[s.rendezvous_index];
    if (lv.node != s.launch_node || rv.node != s.rendezvous_node) fail(tag + " node/index mismatch");
    if (s.launch_time < lv.arrive - 1e-9 || s.launch_time > lv.depart + 1e-9) fail(tag + " launch while truck absent");
    if (s.rendezvous_time < rv.arrive - 1e-9 || s.rendezvous_time > t.latest_rendezvous(s.rendezvous_index) + 1e-9) {
      fail(tag + " rendezvous while truck absent");
    }
    if (s.airborne() > f.drone_endurance + 1e-9) fail(tag + " exceeds endurance");
    if (s.hover_wait < -1e-9) fail(tag + " negative hover");
    const double flight = (s.outbound + s.inbound) / f.drone_speed + f.drone_service + s.hover_wait;
    if (!near(s.airborne(), flight)) fail(tag + " airborne time inconsistent with legs");
    if (g.has_node(s.launch_node) && !near(s.outbound, distance2d(g.node(s.launch_node), s.target))) {
      fail(tag + " outbound distance mismatch");
    }
    if (g.has_node(s.rendezvous_node) && !near(s.inbound, distance2d(s.target, g.node(s.rendezvous_node)))) {
      fail(tag + " inbound distance mismatch");
    }
    auto it = jobs.find(s.job);
    if (it != jobs.end() && !(it->second->target == s.target)) fail(tag + " target mismatch");
    if (auto prev = last.find(s.drone); prev != last.end()) {
      if (s.launch_time < prev->second->rendezvous_time + f.turnaround - 1e-9) {
        fail(tag + " violates turnaround on drone " + std::to_string(s.drone));
      }
    }
    last[s.drone] = &s;
  }

  if (plan.prioritized) {
    bool seen_standard = false;
    for (JobId id : t.stops) {
      auto it = jobs.find(id);
      if (it == jobs.end()) continue;
      if (it->second->category == Category::Standard) seen_standard = true;
      else if (seen_standard) fail("medical job " + std::to_string(id) + " after a standard truck stop");
    }
  }

  // The timeline assumes a structurally sound plan.
  if (!v.empty()) return v;
  const auto timeline = plan_timeline(plan);
  for (const auto& [id, when] : timeline) {
    auto it = plan.completion.find(id);
    if (it == plan.completion.end() || !near(it->second, when, 1e-9)) {
      fail("completion of job " + std::to_string(id) + " disagrees with timeline");
    }
  }
  return v;
}

std::string dump_plan(const HybridPlan& plan) {
  json jobs = json::array();
  for (const DeliveryJob& j : plan.jobs) {
    jobs.push_back({{"id", j.id},
                    {"building", j.building},
                    {"category", std::string(to_string(j.category))},
                    {"target", {j.target.x, j.target.y}}});
  }
  json path = json::array();
  json timetable = json::array();
  for (const TruckVisit& v : plan.truck.visits) {
    path.push_back(v.node);
    timetable.push_back({v.arrive, v.depart});
  }
  json sorties = json::array();
  for (const Sortie& s : plan.sorties) {
    sorties.push_back({{"drone", s.drone},
                       {"job", s.job},
                       {"target", {s.target.x, s.target.y}},
                       {"launch_index", s.launch_index},
                       {"launch_node", s.launch_node},
                       {"launch_time", s.launch_time},
                       {"rendezvous_index", s.rendezvous_index},
                       {"rendezvous_node", s.rendezvous_node},
                       {"rendezvous_time", s.rendezvous_time},
                       {"outbound_m", s.outbound},
                       {"inbound_m", s.inbound},
                       {"hover_wait_s", s.hover_wait},
                       {"deliver_time", s.deliver_time}});
  }
  json completion = json::object();
  for (const auto& [id, t] : plan.completion) completion[std::to_string(id)] = t;

  json doc = {{"set", plan.set_id},
              {"prioritized", plan.prioritized},
              {"fleet", detail::fleet_to_json(plan.fleet)},
              {"jobs", std::move(jobs)},
              {"truck",
               {{"stops", plan.truck.stops},
                {"service_index", plan.truck.service_index},
                {"completion", plan.truck.completion},
                {"node_path", std::move(path)},
                {"timetable", std::move(timetable)}}},
              {"sorties", std::move(sorties)},
              {"completion", std::move(completion)}};
  return doc.dump(1) + "\n";
}

void save_plan(const HybridPlan& plan, const std::filesystem::path& path) {
  detail::write_text_file(path, dump_plan(plan));
}

HybridPlan parse_plan(const std::string& text) {
  const json doc = detail::parse_json_text(text, "plan");
  const Reader root(doc, "");
  HybridPlan plan;
  plan.set_id = root.at("set").u32();
  plan.prioritized = root.at("prioritized").boolean();
  plan.fleet = detail::fleet_from_json(root.at("fleet"));

  const Reader jobs = root.at("jobs");
  for (std::size_t i = 0; i < jobs.array_size(); ++i) {
    const Reader j = jobs.at(i);
    DeliveryJob job;
    job.id = j.at("id").u32();
    job.building = j.at("building").u32();
    try {
      job.category = parse_category(j.at("category").string());
    } catch (const ParseError& e) {
      Reader::fail(j.path() + ".category", e.what());
    }
    job.target = detail::point_from(j.at("target"));
    plan.jobs.push_back(job);
  }

  const Reader truck = root.at("truck");
  const Reader stops = truck.at("stops");
  for (std::size_t i = 0; i < stops.array_size(); ++i) plan.truck.stops.push_back(stops.at(i).u32());
  const Reader service = truck.at("service_index");
  for (std::size_t i = 0; i < service.array_size(); ++i) plan.truck.service_index.push_back(service.at(i).unsigned_int());
  const Reader done = truck.at("completion");
  for (std::size_t i = 0; i < done.array_size(); ++i) plan.truck.completion.push_back(done.at(i).number());
  const Reader path = truck.at("node_path");
  const Reader timetable = truck.at("timetable");
  if (path.array_size() != timetable.array_size()) Reader::fail(timetable.path(), "length differs from node_path");
  for (std::size_t i = 0; i < path.array_size(); ++i) {
    const Reader slot = timetable.at(i);
    if (slot.array_size() != 2) Reader::fail(slot.path(), "expected [arrive, depart]");
    plan.truck.visits.push_back({path.at(i).u32(), slot.at(std::size_t{0}).number(), slot.at(1).number()});
  }

  const Reader sorties = root.at("sorties");
  for (std::size_t i = 0; i < sorties.array_size(); ++i) {
    const Reader r = sorties.at(i);
    Sortie s;
    s.drone = r.at("drone").u32();
    s.job = r.at("job").u32();
    s.target = detail::point_from(r.at("target"));
    s.launch_index = r.at("launch_index").unsigned_int();
    s.launch_node = r.at("launch_node").u32();
    s.launch_time = r.at("launch_time").number();
    s.rendezvous_index = r.at("rendezvous_index").unsigned_int();
    s.rendezvous_node = r.at("rendezvous_node").u32();
    s.rendezvous_time = r.at("rendezvous_time").number();
    s.outbound = r.at("outbound_m").number();
    s.inbound = r.at("inbound_m").number();
    s.hover_wait = r.at("hover_wait_s").number();
    s.deliver_time = r.at("deliver_time").number();
    plan.sorties.push_back(s);
  }

  const Reader completion = root.at("completion");
  if (!completion.node().is_object()) Reader::fail(completion.path(), "expected an object");
  for (const auto& [key, value] : completion.node().items()) {
    const Reader entry(value, completion.path() + "." + key);
    try {
      plan.completion[static_cast<JobId>(std::stoul(key))] = entry.number();
    } catch (const std::logic_error&) {
      Reader::fail(entry.path(), "job key is not an integer");
    }
  }
  return plan;
}

HybridPlan load_plan(const std::filesystem::path& path) { return parse_plan(detail::read_text_file(path)); }

}  // namespace hyfleet
