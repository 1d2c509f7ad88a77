#include <sstream>

#include "hyfleet/errors.hpp"
#include "hyfleet/simcore.hpp"
#include "serialization.hpp"

namespace hyfleet {

using detail::json;
using detail::Reader;

namespace {

json waypoints_json(const Trajectory& tr) {
  json out = json::array();
  for (const Waypoint& w : tr) out.push_back({w.t, w.p.x, w.p.y, w.p.z});
  return out;
}

Trajectory waypoints_from(const Reader& r) {
  Trajectory tr;
  for (std::size_t i = 0; i < r.array_size(); ++i) {
    const Reader w = r.at(i);
    if (w.array_size() != 4) Reader::fail(w.path(), "expected [t, x, y, z]");
    tr.push_back({w.at(std::size_t{0}).number(), {w.at(1).number(), w.at(2).number(), w.at(3).number()}});
    if (i > 0 && tr[i].t < tr[i - 1].t) Reader::fail(w.path(), "waypoint times must be non-decreasing");
  }
  return tr;
}

}  // namespace

std::string trace_events_csv(const DeliveryTrace& trace) {
  std::ostringstream out;
  out << "time_s,kind,vehicle,job,node,x,y,z\n";
  for (const SimEvent& e : trace.events) {
    out << format_number(e.time) << ',' << to_string(e.kind) << ',' << vehicle_name(e.vehicle) << ',';
    if (e.job) out << *e.job;
    out << ',';
    if (e.node) out << *e.node;
    out << ',' << format_number(e.position.x) << ',' << format_number(e.position.y) << ','
        << format_number(e.position.z) << '\n';
  }
  return out.str();
}

std::string dump_trace_json(const DeliveryTrace& trace) {
  json completion = json::object();
  for (const auto& [job, t] : trace.completion) completion[std::to_string(job)] = t;
  json drones = json::array();
  for (const auto& flights : trace.flights) {
    json list = json::array();
    for (const Flight& f : flights) {
      list.push_back({{"job", f.job}, {"launch", f.launch}, {"land", f.land}, {"path", waypoints_json(f.path)}});
    }
    drones.push_back(std::move(list));
  }
  json doc = {{"end_time", trace.end_time},
              {"completion", std::move(completion)},
              {"truck", waypoints_json(trace.truck)},
              {"drones", std::move(drones)}};
  return doc.dump(1) + "\n";
}

DeliveryTrace parse_trace_json(const std::string& text) {
  const json doc = detail::parse_json_text(text, "trace");
  const Reader root(doc, "");
  DeliveryTrace trace;
  trace.end_time = root.at("end_time").number();
  const Reader completion = root.at("completion");
  if (!completion.node().is_object()) Reader::fail(completion.path(), "expected an object");
  for (const auto& [key, value] : completion.node().items()) {
    const Reader entry(value, completion.path() + "." + key);
    try {
      trace.completion[static_cast<JobId>(std::stoul(key))] = entry.number();
    } catch (const std::logic_error&) {
      Reader::fail(entry.path(), "job key is not an integer");
    }
  }
  trace.truck = waypoints_from(root.at("truck"));
  if (trace.truck.empty()) Reader::fail("truck", "trajectory is empty");
  const Reader drones = root.at("drones");
  for (std::size_t d = 0; d < drones.array_size(); ++d) {
    const Reader list = drones.at(d);
    std::vector<Flight> flights;
    for (std::size_t k = 0; k < list.array_size(); ++k) {
      const Reader f = list.at(k);
      flights.push_back({f.at("job").u32(), f.at("launch").number(), f.at("land").number(), waypoints_from(f.at("path"))});
    }
    trace.flights.push_back(std::move(flights));
  }
  return trace;
}

void save_trace(const DeliveryTrace& trace, const std::filesystem::path& csv_path,
                const std::filesystem::path& json_path) {
  detail::write_text_file(csv_path, trace_events_csv(trace));
  detail::write_text_file(json_path, dump_trace_json(trace));
}

DeliveryTrace load_trace(const std::filesystem::path& json_path) {
  return parse_trace_json(detail::read_text_file(json_path));
}

}  // namespace hyfleet
