#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hyfleet/jobs.hpp"
#include "hyfleet/routing.hpp"
#include "hyfleet/scenario.hpp"

namespace hyfleet {

using DroneId = std::uint32_t;

struct FleetConfig {
  MetersPerSecond truck_speed = 8.33;
  Seconds truck_service = 60.0;  // per truck delivery
  std::uint32_t drone_count = 0;
  MetersPerSecond drone_speed = 12.0;
  Seconds drone_endurance = 1200.0;  // max airborne time per sortie
  Seconds drone_service = 30.0;      // at the customer, includes vertical transit
  Seconds turnaround = 60.0;         // aboard the truck between sorties
  Meters drone_altitude = 50.0;

  // Throws ParameterError on non-positive speeds, endurance, turnaround or
  // altitude, or on negative service times.
  void validate() const;

  friend bool operator==(const FleetConfig&, const FleetConfig&) = default;
};

// One pass of the truck over a road node. `depart` > `arrive` only where the
// truck stops to hand over parcels.
struct TruckVisit {
  NodeId node = 0;
  Seconds arrive = 0.0;
  Seconds depart = 0.0;

  friend bool operator==(const TruckVisit&, const TruckVisit&) = default;
};

struct TruckSchedule {
  std::vector<JobId> stops;                // jobs handed over by the truck, in order
  std::vector<std::size_t> service_index;  // visit index where each stop is served
  std::vector<Seconds> completion;         // per stop
  std::vector<TruckVisit> visits;          // full node path, depot to depot

  // The truck parks at the depot after its last visit, so the final visit
  // accepts drones arriving at any later time.
  Seconds latest_rendezvous(std::size_t visit) const;

  friend bool operator==(const TruckSchedule&, const TruckSchedule&) = default;
};

struct Sortie {
  DroneId drone = 0;
  JobId job = 0;
  Point target;
  std::size_t launch_index = 0;  // into TruckSchedule::visits
  NodeId launch_node = 0;
  Seconds launch_time = 0.0;
  std::size_t rendezvous_index = 0;
  NodeId rendezvous_node = 0;
  Seconds rendezvous_time = 0.0;
  Meters outbound = 0.0;  // launch node -> target, horizontal
  Meters inbound = 0.0;   // target -> rendezvous node, horizontal
  Seconds hover_wait = 0.0;
  Seconds deliver_time = 0.0;  // handover complete

  Seconds airborne() const { return rendezvous_time - launch_time; }

  friend bool operator==(const Sortie&, const Sortie&) = default;
};

struct SortieInfeasible {
  enum class Reason { NoRendezvous, EnduranceExceeded, LaunchUnavailable };
  Reason reason;
};

std::string_view to_string(SortieInfeasible::Reason r);

using SortieResult = std::variant<Sortie, SortieInfeasible>;

struct HybridPlan {
  std::uint32_t set_id = 0;
  bool prioritized = false;
  FleetConfig fleet;
  std::vector<DeliveryJob> jobs;
  TruckSchedule truck;
  std::vector<Sortie> sorties;  // ordered by drone, then launch time
  std::map<JobId, Seconds> completion;

  Seconds total_waiting() const;
  // Time when the truck is parked and every drone is back aboard.
  Seconds makespan() const;

  friend bool operator==(const HybridPlan&, const HybridPlan&) = default;
};

// Truck timetable for visiting `stops` in order and returning to the depot.
TruckSchedule build_truck_schedule(const Scenario& scenario, const DeliverySet& set,
                                   std::span<const JobId> stops, const FleetConfig& fleet);

// Necessary condition for any sortie: out-and-back to the closest road node
// fits in the endurance.
bool drone_eligible(const DeliveryJob& job, const FleetConfig& fleet, const Scenario& scenario);

// Drone leaves the truck at visit `launch_index` (no earlier than
// `drone_free_at`) and rejoins it at the first later visit it can reach
// before the truck moves on.
SortieResult compute_sortie(const TruckSchedule& truck, std::size_t launch_index, const DeliveryJob& job,
                            Seconds drone_free_at, const FleetConfig& fleet, const Scenario& scenario,
                            DroneId drone = 0);

HybridPlan plan_hybrid(const Scenario& scenario, const DeliverySet& set, const FleetConfig& fleet,
                       bool prioritize, Solver solver = Solver::Heuristic);

// Plans for 0..max_drones drones on one instance; element k uses k drones.
// Each plan is at least as good as its predecessor.
std::vector<HybridPlan> plan_hybrid_series(const Scenario& scenario, const DeliverySet& set,
                                           const FleetConfig& fleet, bool prioritize, std::uint32_t max_drones,
                                           Solver solver = Solver::Heuristic);

std::map<JobId, Seconds> plan_timeline(const HybridPlan& plan);

// Human-readable invariant violations; empty when the plan is valid.
std::vector<std::string> check_plan(const HybridPlan& plan, const Scenario& scenario);

std::string dump_plan(const HybridPlan& plan);
void save_plan(const HybridPlan& plan, const std::filesystem::path& path);
HybridPlan parse_plan(const std::string& text);
HybridPlan load_plan(const std::filesystem::path& path);

}  // namespace hyfleet
