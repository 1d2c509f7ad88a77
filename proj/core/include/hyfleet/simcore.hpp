#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hyfleet/hybrid.hpp"

namespace hyfleet {

// Vehicle 0 is the truck; drone d is vehicle d + 1.
using VehicleId = std::uint32_t;
inline constexpr VehicleId kTruck = 0;
inline constexpr VehicleId drone_vehicle(DroneId d) { return d + 1; }
std::string vehicle_name(VehicleId v);

enum class EventKind { TruckArrive, TruckServe, DroneLaunch, DroneDeliver, DroneRendezvous, TourComplete };

std::string_view to_string(EventKind k);

struct SimEvent {
  Seconds time = 0.0;
  EventKind kind = EventKind::TourComplete;
  VehicleId vehicle = kTruck;
  std::optional<JobId> job;
  std::optional<NodeId> node;
  Point position;

  friend bool operator==(const SimEvent&, const SimEvent&) = default;
};

struct Waypoint {
  Seconds t = 0.0;
  Point p;

  friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

// Piecewise-linear position over time; waypoint times are non-decreasing.
using Trajectory = std::vector<Waypoint>;

Point sample(const Trajectory& trajectory, Seconds t);

// One airborne interval of a drone. Outside flights a drone rides the truck.
struct Flight {
  JobId job = 0;
  Seconds launch = 0.0;
  Seconds land = 0.0;
  Trajectory path;

  friend bool operator==(const Flight&, const Flight&) = default;
};

struct DeliveryTrace {
  std::vector<SimEvent> events;
  std::map<JobId, Seconds> completion;
  Trajectory truck;
  std::vector<std::vector<Flight>> flights;  // per drone, in time order
  Seconds end_time = 0.0;

  std::size_t drone_count() const { return flights.size(); }
  // Flight in progress at t, if any.
  const Flight* flight_at(DroneId drone, Seconds t) const;

  friend bool operator==(const DeliveryTrace&, const DeliveryTrace&) = default;
};

// Executes the plan event by event: truck motion along its node path,
// handovers, en-route launches and rendezvous. Throws ValidationError if the
// plan does not fit the scenario and fleet, or if execution diverges from it.
DeliveryTrace simulate(const Scenario& scenario, const HybridPlan& plan, const FleetConfig& fleet);

// Throws ParameterError when t is outside [0, end_time].
Point position_at(const DeliveryTrace& trace, VehicleId vehicle, Seconds t);

// One row per event: time_s,kind,vehicle,job,node,x,y,z
std::string trace_events_csv(const DeliveryTrace& trace);
// Trajectories and completions; events are carried by the CSV.
std::string dump_trace_json(const DeliveryTrace& trace);
DeliveryTrace parse_trace_json(const std::string& text);

void save_trace(const DeliveryTrace& trace, const std::filesystem::path& csv_path,
                const std::filesystem::path& json_path);
DeliveryTrace load_trace(const std::filesystem::path& json_path);

// Shortest decimal form that round-trips; used by every CSV writer.
std::string format_number(double v);

}  // namespace hyfleet
