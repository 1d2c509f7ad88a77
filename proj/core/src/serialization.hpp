#pragma once

// JSON mappings shared by the plan, trace and experiment readers/writers.

#include "hyfleet/hybrid.hpp"
#include "json_util.hpp"

namespace hyfleet::detail {

inline json fleet_to_json(const FleetConfig& f) {
  return {{"truck_speed_mps", f.truck_speed},     {"truck_service_s", f.truck_service},
          {"drone_count", f.drone_count},         {"drone_speed_mps", f.drone_speed},
          {"drone_endurance_s", f.drone_endurance}, {"drone_service_s", f.drone_service},
          {"turnaround_s", f.turnaround},         {"drone_altitude_m", f.drone_altitude}};
}

// Missing keys keep the defaults in `f`.
inline FleetConfig fleet_from_json(const Reader& r, FleetConfig f = {}) {
  auto num = [&](const char* key, double& out) {
    if (r.has(key)) out = r.at(key).number();
  };
  num("truck_speed_mps", f.truck_speed);
  num("truck_service_s", f.truck_service);
  if (r.has("drone_count")) f.drone_count = r.at("drone_count").u32();
  num("drone_speed_mps", f.drone_speed);
  num("drone_endurance_s", f.drone_endurance);
  num("drone_service_s", f.drone_service);
  num("turnaround_s", f.turnaround);
  num("drone_altitude_m", f.drone_altitude);
  return f;
}

inline json point_json(const Point& p) { return json::array({p.x, p.y, p.z}); }

inline Point point_from(const Reader& r) {
  const std::size_t n = r.array_size();
  if (n != 2 && n != 3) Reader::fail(r.path(), "expected [x, y] or [x, y, z]");
  return {r.at(std::size_t{0}).number(), r.at(1).number(), n == 3 ? r.at(2).number() : 0.0};
}

}  // namespace hyfleet::detail
