#include "hyfleet/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hyfleet/errors.hpp"

namespace hyfleet {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGainEpsilon = 1e-9;

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

// Shortest road legs between stop nodes, computed on first use.
class LegCache {
 public:
  LegCache(const Scenario& scenario, MetersPerSecond max_speed) : scenario_(scenario), max_speed_(max_speed) {}

  const std::vector<NodeId>& path(NodeId from, NodeId to) {
    auto key = std::make_pair(from, to);
    auto it = paths_.find(key);
    if (it == paths_.end()) {
      it = paths_.emplace(key, shortest_path(scenario_.graph, from, to, max_speed_).nodes).first;
    }
    return it->second;
  }

 private:
  const Scenario& scenario_;
  MetersPerSecond max_speed_;
  std::map<std::pair<NodeId, NodeId>, std::vector<NodeId>> paths_;
};

TruckSchedule schedule_with(LegCache& legs, const Scenario& scenario, std::span<const JobId> stops,
                            std::span<const NodeId> stop_nodes, const FleetConfig& fleet) {
  const RoadGraph& g = scenario.graph;
  TruckSchedule s;
  s.visits.push_back({scenario.depot, 0.0, 0.0});
  int served = 0;
  auto drive = [&](NodeId to) {
    const std::vector<NodeId>& path = legs.path(s.visits.back().node, to);
    for (std::size_t k = 1; k < path.size(); ++k) {
      const RoadEdge* e = g.find_edge(path[k - 1], path[k]);
      const Seconds t = s.visits.back().depart + edge_time(*e, fleet.truck_speed);
      s.visits.push_back({path[k], t, t});
    }
  };
  for (std::size_t k = 0; k < stops.size(); ++k) {
    const std::size_t before = s.visits.size();
    drive(stop_nodes[k]);
    // Back-to-back stops at one node share a visit.
    served = s.visits.size() == before && k > 0 ? served + 1 : 1;
    TruckVisit& here = s.visits.back();
    here.depart = here.arrive + served * fleet.truck_service;
    s.stops.push_back(stops[k]);
    s.service_index.push_back(s.visits.size() - 1);
    s.completion.push_back(here.depart);
  }
  drive(scenario.depot);
  return s;
}

// Per-instance data shared by all candidate evaluations.
struct Instance {
  const Scenario& scenario;
  const DeliverySet& set;
  const FleetConfig& fleet;
  LegCache legs;
  std::map<JobId, NodeId> node_of;
  std::map<JobId, Meters> road_gap;  // distance from target to its closest road node

  Instance(const Scenario& sc, const DeliverySet& st, const FleetConfig& fl)
      : scenario(sc), set(st), fleet(fl), legs(sc, fl.truck_speed) {
    for (const DeliveryJob& j : st.jobs) {
      const NodeId n = job_node(sc, j);
      node_of[j.id] = n;
      road_gap[j.id] = distance2d(sc.graph.node(n), j.target);
    }
  }

  TruckSchedule schedule(std::span<const JobId> stops) {
    std::vector<NodeId> nodes;
    nodes.reserve(stops.size());
    for (JobId id : stops) nodes.push_back(node_of.at(id));
    return schedule_with(legs, scenario, stops, nodes, fleet);
  }
};

// Places a drone's jobs in order, each at the launch visit giving the
// earliest handover. Empty result when some job cannot be placed.
std::optional<std::vector<Sortie>> place_sorties(Instance& inst, const TruckSchedule& truck,
                                                 std::span<const JobId> jobs, DroneId drone) {
  std::vector<Sortie> out;
  Seconds free_at = 0.0;
  const FleetConfig& f = inst.fleet;
  for (JobId id : jobs) {
    const DeliveryJob& job = inst.set.job(id);
    const Seconds min_flight = inst.road_gap.at(id) / f.drone_speed + f.drone_service;
    std::optional<Sortie> best;
    for (std::size_t i = 0; i + 1 < truck.visits.size(); ++i) {
      const TruckVisit& v = truck.visits[i];
      if (v.depart < free_at) continue;
      const Seconds launch = std::max(v.arrive, free_at);
      if (best && launch + min_flight >= best->deliver_time) break;
      SortieResult r = compute_sortie(truck, i, job, free_at, f, inst.scenario, drone);
      if (auto* s = std::get_if<Sortie>(&r)) {
        if (!best || s->deliver_time < best->deliver_time) best = *s;
      }
    }
    if (!best) return std::nullopt;
    free_at = best->rendezvous_time + f.turnaround;
    out.push_back(*best);
  }
  return out;
}

Seconds sum_delivered(const std::vector<Sortie>& sorties) {
  Seconds total = 0.0;
  for (const Sortie& s : sorties) total += s.deliver_time;
  return total;
}

struct PlanState {
  std::vector<JobId> truck_stops;
  std::vector<std::vector<JobId>> drone_jobs;  // one list per drone
};

struct Evaluated {
  PlanState state;
  TruckSchedule truck;
  std::vector<std::vector<Sortie>> sorties;
  Seconds objective = kInf;
};

std::optional<Evaluated> evaluate(Instance& inst, PlanState state) {
  Evaluated e;
  e.truck = inst.schedule(state.truck_stops);
  e.objective = std::accumulate(e.truck.completion.begin(), e.truck.completion.end(), 0.0);
  for (DroneId d = 0; d < state.drone_jobs.size(); ++d) {
    auto placed = place_sorties(inst, e.truck, state.drone_jobs[d], d);
    if (!placed) return std::nullopt;
    e.objective += sum_delivered(*placed);
    e.sorties.push_back(std::move(*placed));
  }
  e.state = std::move(state);
  return e;
}

// Repeatedly moves the single truck job to a drone sortie that reduces total
// waiting time the most, until nothing improves.
Evaluated improve(Instance& inst, Evaluated current) {
  const std::size_t drones = current.state.drone_jobs.size();
  for (;;) {
    std::vector<JobId> by_id = current.state.truck_stops;
    std::sort(by_id.begin(), by_id.end());

    Seconds best_gain = kGainEpsilon;
    std::optional<PlanState> best;
    for (JobId job : by_id) {
      if (!drone_eligible(inst.set.job(job), inst.fleet, inst.scenario)) continue;
      PlanState base = current.state;
      base.truck_stops.erase(std::find(base.truck_stops.begin(), base.truck_stops.end(), job));
      const TruckSchedule truck = inst.schedule(base.truck_stops);
      const Seconds truck_sum = std::accumulate(truck.completion.begin(), truck.completion.end(), 0.0);

      // Existing sorties re-placed against the shortened truck route.
      std::vector<Seconds> kept(drones, 0.0);
      std::size_t infeasible = 0;
      Seconds kept_sum = 0.0;
      for (DroneId d = 0; d < drones; ++d) {
        if (auto placed = place_sorties(inst, truck, base.drone_jobs[d], d)) {
          kept[d] = sum_delivered(*placed);
          kept_sum += kept[d];
        } else {
          ++infeasible;
        }
      }
      if (infeasible > 0) continue;

      bool tried_idle = false;
      for (DroneId d = 0; d < drones; ++d) {
        const std::vector<JobId>& list = base.drone_jobs[d];
        if (list.empty()) {
          // Idle drones are interchangeable; the lowest id stands for all.
          if (tried_idle) continue;
          tried_idle = true;
        }
        const Seconds others = kept_sum - kept[d];
        for (std::size_t pos = 0; pos <= list.size(); ++pos) {
          std::vector<JobId> trial = list;
          trial.insert(trial.begin() + static_cast<std::ptrdiff_t>(pos), job);
          auto placed = place_sorties(inst, truck, trial, d);
          if (!placed) continue;
          const Seconds objective = truck_sum + others + sum_delivered(*placed);
          const Seconds gain = current.objective - objective;
          if (gain > best_gain + kGainEpsilon * std::max(1.0, best_gain)) {
            best_gain = gain;
            PlanState next = base;
            next.drone_jobs[d] = std::move(trial);
            best = std::move(next);
          }
        }
      }
    }
    if (!best) return current;
    auto next = evaluate(inst, std::move(*best));
    if (!next) throw Error("hybrid planner produced an infeasible state");
    current = std::move(*next);
  }
}

HybridPlan to_plan(const Instance& inst, const Evaluated& e, bool prioritized, std::uint32_t drone_count) {
  HybridPlan plan;
  plan.set_id = inst.set.id;
  plan.prioritized = prioritized;
  plan.fleet = inst.fleet;
  plan.fleet.drone_count = drone_count;
  plan.jobs = inst.set.jobs;
  plan.truck = e.truck;
  for (const auto& per_drone : e.sorties) {
    for (const Sortie& s : per_drone) plan.sorties.push_back(s);
  }
  plan.completion = plan_timeline(plan);
  return plan;
}

Tour base_tour(const Scenario& scenario, const DeliverySet& set, const FleetConfig& fleet, bool prioritize,
               Solver solver) {
  if (set.jobs.empty()) return {scenario.depot, {}, true};
  return prioritize ? priority_schedule(scenario, set, solver, fleet.truck_speed)
                    : plain_schedule(scenario, set, solver, fleet.truck_speed);
}

}  // namespace

void FleetConfig::validate() const {
  if (!positive_finite(truck_speed)) throw ParameterError("truck_speed must be > 0");
  // Zero service times are allowed; handy for hand-checkable instances.
  if (!(std::isfinite(truck_service) && truck_service >= 0.0)) throw ParameterError("truck_service must be >= 0");
  if (!positive_finite(drone_speed)) throw ParameterError("drone_speed must be > 0");
  if (!positive_finite(drone_endurance)) throw ParameterError("drone_endurance must be > 0");
  if (!(std::isfinite(drone_service) && drone_service >= 0.0)) throw ParameterError("drone_service must be >= 0");
  if (!positive_finite(turnaround)) throw ParameterError("turnaround must be > 0");
  if (!positive_finite(drone_altitude)) throw ParameterError("drone_altitude must be > 0");
}

Seconds TruckSchedule::latest_rendezvous(std::size_t visit) const {
  return visit + 1 == visits.size() ? kInf : visits.at(visit).depart;
}

std::string_view to_string(SortieInfeasible::Reason r) {
  switch (r) {
    case SortieInfeasible::Reason::NoRendezvous: return "no rendezvous node";
    case SortieInfeasible::Reason::EnduranceExceeded: return "endurance exceeded";
    case SortieInfeasible::Reason::LaunchUnavailable: return "truck gone before drone is free";
  }
  return "unknown";
}

Seconds HybridPlan::total_waiting() const {
  Seconds total = 0.0;
  for (const auto& [job, t] : completion) total += t;
  return total;
}

Seconds HybridPlan::makespan() const {
  Seconds end = truck.visits.empty() ? 0.0 : truck.visits.back().depart;
  for (const Sortie& s : sorties) end = std::max(end, s.rendezvous_time);
  return end;
}

TruckSchedule build_truck_schedule(const Scenario& scenario, const DeliverySet& set, std::span<const JobId> stops,
                                   const FleetConfig& fleet) {
  LegCache legs(scenario, fleet.truck_speed);
  std::vector<NodeId> nodes;
  for (JobId id : stops) nodes.push_back(job_node(scenario, set.job(id)));
  return schedule_with(legs, scenario, stops, nodes, fleet);
}

bool drone_eligible(const DeliveryJob& job, const FleetConfig& fleet, const Scenario& scenario) {
  const Meters gap = distance2d(scenario.graph.node(job_node(scenario, job)), job.target);
  return 2.0 * gap / fleet.drone_speed + fleet.drone_service <= fleet.drone_endurance;
}

SortieResult compute_sortie(const TruckSchedule& truck, std::size_t launch_index, const DeliveryJob& job,
                            Seconds drone_free_at, const FleetConfig& fleet, const Scenario& scenario,
                            DroneId drone) {
  using Reason = SortieInfeasible::Reason;
  if (launch_index + 1 >= truck.visits.size()) return SortieInfeasible{Reason::NoRendezvous};
  const TruckVisit& from = truck.visits[launch_index];
  const Seconds launch = std::max(from.arrive, drone_free_at);
  if (launch > from.depart) return SortieInfeasible{Reason::LaunchUnavailable};

  Sortie s;
  s.drone = drone;
  s.job = job.id;
  s.target = job.target;
  s.launch_index = launch_index;
  s.launch_node = from.node;
  s.launch_time = launch;
  s.outbound = distance2d(scenario.graph.node(from.node), job.target);
  s.deliver_time = launch + s.outbound / fleet.drone_speed + fleet.drone_service;

  const Seconds deadline = launch + fleet.drone_endurance;
  for (std::size_t r = launch_index + 1; r < truck.visits.size(); ++r) {
    const TruckVisit& at = truck.visits[r];
    // Later visits only get later; once the truck itself is too late, stop.
    if (at.arrive > deadline) return SortieInfeasible{Reason::EnduranceExceeded};
    const Meters inbound = distance2d(job.target, scenario.graph.node(at.node));
    const Seconds reach = s.deliver_time + inbound / fleet.drone_speed;
    if (reach > truck.latest_rendezvous(r)) continue;
    const Seconds meet = std::max(reach, at.arrive);
    if (meet - launch > fleet.drone_endurance) return SortieInfeasible{Reason::EnduranceExceeded};
    s.rendezvous_index = r;
    s.rendezvous_node = at.node;
    s.rendezvous_time = meet;
    s.inbound = inbound;
    s.hover_wait = meet - reach;
    return s;
  }
  return SortieInfeasible{Reason::NoRendezvous};
}

std::vector<HybridPlan> plan_hybrid_series(const Scenario& scenario, const DeliverySet& set,
                                           const FleetConfig& fleet, bool prioritize, std::uint32_t max_drones,
                                           Solver solver) {
  fleet.validate();
  Instance inst(scenario, set, fleet);
  const Tour tour = base_tour(scenario, set, fleet, prioritize, solver);

  std::vector<HybridPlan> plans;
  auto truck_only = evaluate(inst, PlanState{tour.stops, {}});
  if (!truck_only) throw Error("truck-only plan infeasible");
  Evaluated previous = std::move(*truck_only);
  plans.push_back(to_plan(inst, previous, prioritize, 0));

  for (std::uint32_t k = 1; k <= max_drones; ++k) {
    Evaluated fresh = improve(inst, *evaluate(inst, PlanState{tour.stops, std::vector<std::vector<JobId>>(k)}));
    // Continuing from the (k-1)-drone plan never does worse than that plan.
    PlanState grown = previous.state;
    grown.drone_jobs.emplace_back();
    Evaluated warm = improve(inst, *evaluate(inst, std::move(grown)));
    previous = fresh.objective <= warm.objective ? std::move(fresh) : std::move(warm);
    plans.push_back(to_plan(inst, previous, prioritize, k));
  }
  return plans;
}

HybridPlan plan_hybrid(const Scenario& scenario, const DeliverySet& set, const FleetConfig& fleet,
                       bool prioritize, Solver solver) {
  return plan_hybrid_series(scenario, set, fleet, prioritize, fleet.drone_count, solver).back();
}

std::map<JobId, Seconds> plan_timeline(const HybridPlan& plan) {
  std::map<JobId, Seconds> out;
  const auto& t = plan.truck;
  // Jobs served at the same visit are handed over one after another.
  std::map<std::size_t, int> served_at;
  for (std::size_t k = 0; k < t.stops.size(); ++k) {
    const std::size_t idx = t.service_index.at(k);
    const int order = ++served_at[idx];
    out[t.stops[k]] = t.visits.at(idx).arrive + order * plan.fleet.truck_service;
  }
  for (const Sortie& s : plan.sorties) {
    out[s.job] = s.launch_time + s.outbound / plan.fleet.drone_speed + plan.fleet.drone_service;
  }
  return out;
}

}  // namespace hyfleet
