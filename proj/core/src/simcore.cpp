#include "hyfleet/simcore.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <limits>
#include <queue>
#include <string>

#include "hyfleet/errors.hpp"

namespace hyfleet {
namespace {

constexpr Seconds kClockTolerance = 1e-6;

// Minimal event engine: callbacks ordered by (time, insertion order).
class EventQueue {
 public:
  void at(Seconds t, std::function<void()> fn) { queue_.push({t, next_seq_++, std::move(fn)}); }

  bool step() {
    if (queue_.empty()) return false;
    Item item = queue_.top();
    queue_.pop();
    now_ = item.time;
    item.fn();
    return true;
  }

  Seconds now() const { return now_; }

 private:
  struct Item {
    Seconds time;
    std::uint64_t seq;
    std::function<void()> fn;
  };
  struct Later {
    bool operator()(const Item& a, const Item& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };
  std::priority_queue<Item, std::vector<Item>, Later> queue_;
  std::uint64_t next_seq_ = 0;
  Seconds now_ = 0.0;
};

class Run {
 public:
  Run(const Scenario& scenario, const HybridPlan& plan, const FleetConfig& fleet)
      : sc_(scenario), plan_(plan), fleet_(fleet), drones_(fleet.drone_count) {
    const auto& visits = plan.truck.visits;
    served_at_.resize(visits.size());
    for (std::size_t k = 0; k < plan.truck.stops.size(); ++k) {
      served_at_[plan.truck.service_index[k]].push_back(plan.truck.stops[k]);
    }
    for (const Sortie& s : plan.sorties) drones_[s.drone].sorties.push_back(&s);
    for (const DeliveryJob& j : plan.jobs) targets_[j.id] = j.target;
    trace_.flights.resize(fleet.drone_count);
  }

  DeliveryTrace execute() {
    q_.at(0.0, [this] { truck_reaches(0); });
    while (q_.step()) {
    }
    for (DroneId d = 0; d < drones_.size(); ++d) {
      if (drones_[d].next < drones_[d].sorties.size() || !drones_[d].aboard) {
        throw ValidationError("drone " + std::to_string(d) + " did not complete its sorties");
      }
    }
    trace_.end_time = std::max(truck_.depart, last_rendezvous_);
    emit(trace_.end_time, EventKind::TourComplete, kTruck, std::nullopt, sc_.depot, sc_.graph.node(sc_.depot));
    return std::move(trace_);
  }

 private:
  struct TruckState {
    std::size_t visit = 0;
    Seconds arrive = 0.0;
    Seconds depart = 0.0;
  };

  struct DroneState {
    std::vector<const Sortie*> sorties;
    std::size_t next = 0;  // next sortie to fly
    bool aboard = true;
    bool launch_pending = false;
    Seconds free_at = 0.0;
  };

  Point node_pos(NodeId n) const { return sc_.graph.node(n); }
  bool parked() const { return truck_.visit + 1 == plan_.truck.visits.size(); }

  void emit(Seconds t, EventKind kind, VehicleId v, std::optional<JobId> job, std::optional<NodeId> node, Point p) {
    trace_.events.push_back({t, kind, v, job, node, p});
  }

  void truck_reaches(std::size_t i) {
    const auto& visits = plan_.truck.visits;
    const Seconds now = q_.now();
    const NodeId node = visits[i].node;
    truck_.visit = i;
    truck_.arrive = now;
    truck_.depart = now + static_cast<double>(served_at_[i].size()) * fleet_.truck_service;
    if (i > 0) emit(now, EventKind::TruckArrive, kTruck, std::nullopt, node, node_pos(node));
    trace_.truck.push_back({now, node_pos(node)});
    if (truck_.depart > now) trace_.truck.push_back({truck_.depart, node_pos(node)});

    for (std::size_t k = 0; k < served_at_[i].size(); ++k) {
      const JobId job = served_at_[i][k];
      const Seconds done = now + static_cast<double>(k + 1) * fleet_.truck_service;
      q_.at(done, [this, job, node, done] {
        trace_.completion[job] = done;
        emit(done, EventKind::TruckServe, kTruck, job, node, node_pos(node));
      });
    }

    for (DroneId d = 0; d < drones_.size(); ++d) {
      DroneState& ds = drones_[d];
      if (ds.aboard && !ds.launch_pending && ds.next < ds.sorties.size() && ds.sorties[ds.next]->launch_index < i) {
        throw ValidationError("drone " + std::to_string(d) + " missed its launch at visit " +
                              std::to_string(ds.sorties[ds.next]->launch_index));
      }
      try_launch(d);
    }
    auto waiting = waiting_.find(i);
    if (waiting != waiting_.end()) {
      for (DroneId d : waiting->second) q_.at(now, [this, d] { rendezvous(d); });
      waiting_.erase(waiting);
    }

    if (i + 1 < visits.size()) {
      const RoadEdge* e = sc_.graph.find_edge(node, visits[i + 1].node);
      const Seconds next = truck_.depart + edge_time(*e, fleet_.truck_speed);
      q_.at(next, [this, i] { truck_reaches(i + 1); });
    }
  }

  void try_launch(DroneId d) {
    DroneState& ds = drones_[d];
    if (!ds.aboard || ds.launch_pending || ds.next >= ds.sorties.size()) return;
    const Sortie& s = *ds.sorties[ds.next];
    if (truck_.visit != s.launch_index) return;
    const Seconds when = std::max(truck_.arrive, ds.free_at);
    if (when > truck_.depart) return;  // reported as a missed launch at the next visit
    ds.launch_pending = true;
    q_.at(when, [this, d] { launch(d); });
  }

  void launch(DroneId d) {
    DroneState& ds = drones_[d];
    const Sortie& s = *ds.sorties[ds.next];
    const Seconds now = q_.now();
    ds.aboard = false;
    ds.launch_pending = false;
    const Point from = node_pos(s.launch_node);
    emit(now, EventKind::DroneLaunch, drone_vehicle(d), s.job, s.launch_node, from);

    const Point target = targets_.at(s.job);
    const Meters out = distance2d(from, target);
    const Seconds over_target = now + out / fleet_.drone_speed;
    const Seconds done = now + out / fleet_.drone_speed + fleet_.drone_service;
    const double alt = fleet_.drone_altitude;

    Flight f;
    f.job = s.job;
    f.launch = now;
    f.path.push_back({now, {from.x, from.y, alt}});
    f.path.push_back({over_target, {target.x, target.y, alt}});
    f.path.push_back({done, {target.x, target.y, alt}});
    trace_.flights[d].push_back(std::move(f));

    q_.at(done, [this, d, target, alt] {
      const Sortie& s = *drones_[d].sorties[drones_[d].next];
      const Seconds t = q_.now();
      trace_.completion[s.job] = t;
      emit(t, EventKind::DroneDeliver, drone_vehicle(d), s.job, std::nullopt, {target.x, target.y, alt});
      const Point meet = node_pos(s.rendezvous_node);
      const Seconds reach = t + distance2d(target, meet) / fleet_.drone_speed;
      trace_.flights[d].back().path.push_back({reach, {meet.x, meet.y, alt}});
      q_.at(reach, [this, d] { reach_rendezvous(d); });
    });
  }

  void reach_rendezvous(DroneId d) {
    const Sortie& s = *drones_[d].sorties[drones_[d].next];
    const Seconds now = q_.now();
    if (truck_.visit < s.rendezvous_index) {
      waiting_[s.rendezvous_index].push_back(d);
      return;
    }
    if (truck_.visit > s.rendezvous_index || (!parked() && now > truck_.depart + kClockTolerance)) {
      throw ValidationError("drone " + std::to_string(d) + " missed the truck at visit " +
                            std::to_string(s.rendezvous_index));
    }
    rendezvous(d);
  }

  void rendezvous(DroneId d) {
    DroneState& ds = drones_[d];
    const Sortie& s = *ds.sorties[ds.next];
    const Seconds now = q_.now();
    const Seconds airborne = now - trace_.flights[d].back().launch;
    if (airborne > fleet_.drone_endurance + kClockTolerance) {
      throw ValidationError("drone " + std::to_string(d) + " exceeded its endurance");
    }
    Flight& f = trace_.flights[d].back();
    if (f.path.back().t < now) f.path.push_back({now, f.path.back().p});
    f.land = now;
    emit(now, EventKind::DroneRendezvous, drone_vehicle(d), s.job, s.rendezvous_node, node_pos(s.rendezvous_node));
    last_rendezvous_ = std::max(last_rendezvous_, now);
    ds.aboard = true;
    ds.free_at = now + fleet_.turnaround;
    ++ds.next;
    try_launch(d);
  }

  const Scenario& sc_;
  const HybridPlan& plan_;
  const FleetConfig& fleet_;
  EventQueue q_;
  TruckState truck_;
  std::vector<DroneState> drones_;
  std::vector<std::vector<JobId>> served_at_;
  std::map<JobId, Point> targets_;
  std::map<std::size_t, std::vector<DroneId>> waiting_;
  Seconds last_rendezvous_ = 0.0;
  DeliveryTrace trace_;
};

}  // namespace

std::string vehicle_name(VehicleId v) { return v == kTruck ? "truck" : "drone" + std::to_string(v - 1); }

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::TruckArrive: return "TruckArrive";
    case EventKind::TruckServe: return "TruckServe";
    case EventKind::DroneLaunch: return "DroneLaunch";
    case EventKind::DroneDeliver: return "DroneDeliver";
    case EventKind::DroneRendezvous: return "DroneRendezvous";
    case EventKind::TourComplete: return "TourComplete";
  }
  return "?";
}

Point sample(const Trajectory& tr, Seconds t) {
  if (tr.empty()) throw ParameterError("empty trajectory");
  if (t <= tr.front().t) return tr.front().p;
  if (t >= tr.back().t) return tr.back().p;
  // First waypoint strictly after t.
  auto hi = std::upper_bound(tr.begin(), tr.end(), t, [](Seconds v, const Waypoint& w) { return v < w.t; });
  auto lo = hi - 1;
  const double span = hi->t - lo->t;
  if (span <= 0.0) return hi->p;
  return lerp(lo->p, hi->p, (t - lo->t) / span);
}

const Flight* DeliveryTrace::flight_at(DroneId drone, Seconds t) const {
  for (const Flight& f : flights.at(drone)) {
    if (f.launch <= t && t <= f.land) return &f;
  }
  return nullptr;
}

DeliveryTrace simulate(const Scenario& scenario, const HybridPlan& plan, const FleetConfig& fleet) {
  HybridPlan checked = plan;
  checked.fleet = fleet;
  const auto problems = check_plan(checked, scenario);
  if (!problems.empty()) {
    std::string msg = "plan does not match scenario/fleet: " + problems.front();
    if (problems.size() > 1) msg += " (+" + std::to_string(problems.size() - 1) + " more)";
    throw ValidationError(msg);
  }
  return Run(scenario, plan, fleet).execute();
}

Point position_at(const DeliveryTrace& trace, VehicleId vehicle, Seconds t) {
  if (!(t >= 0.0 && t <= trace.end_time)) {
    throw ParameterError("time " + format_number(t) + " outside [0, " + format_number(trace.end_time) + "]");
  }
  if (vehicle != kTruck) {
    const DroneId d = vehicle - 1;
    if (d >= trace.drone_count()) throw ParameterError("unknown vehicle " + std::to_string(vehicle));
    if (const Flight* f = trace.flight_at(d, t)) return sample(f->path, t);
  }
  return sample(trace.truck, t);
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace hyfleet
