#pragma once

#include <vector>

#include "hyfleet/hybrid.hpp"
#include "hyfleet/jobs.hpp"
#include "hyfleet/rng.hpp"
#include "hyfleet/scenario.hpp"

namespace hyfleet::testing {

// Axis-aligned box footprint, counter-clockwise.
inline Building box_building(BuildingId id, double x0, double y0, double x1, double y1, double height,
                             Point access) {
  return Building{id, {{x0, y0, 0}, {x1, y0, 0}, {x1, y1, 0}, {x0, y1, 0}}, height, access};
}

// Road along the x axis: n nodes `spacing` apart, node i at (i * spacing, 0).
inline Scenario line_scenario(std::size_t n, double spacing, double speed = kDefaultSpeedLimit) {
  std::vector<Point> nodes;
  std::vector<RoadEdge> edges;
  for (std::size_t i = 0; i < n; ++i) nodes.push_back({static_cast<double>(i) * spacing, 0, 0});
  for (std::size_t i = 0; i + 1 < n; ++i) {
    edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(i + 1), spacing, speed});
  }
  Scenario s;
  s.graph = RoadGraph(std::move(nodes), std::move(edges));
  s.depot = 0;
  s.base_station = {0, 50, 30};
  return s;
}

inline DeliveryJob job_at(JobId id, Point target, Category c = Category::Standard) {
  return DeliveryJob{id, id, target, c};
}

// Straight 20-node road (100 m spacing, 10 m/s). The truck drives to a
// parcel at the far end while drone d serves drone_targets[d], launched
// from the depot as the truck leaves.
struct LinePlan {
  Scenario scenario;
  HybridPlan plan;
};

inline LinePlan line_plan(std::vector<Point> drone_targets, double drone_service, double drone_speed = 20) {
  LinePlan out;
  out.scenario = line_scenario(20, 100, 10);
  Scenario& s = out.scenario;
  s.buildings.push_back(box_building(0, 1890, 20, 1910, 40, 10, {1900, 15, 0}));
  for (std::size_t d = 0; d < drone_targets.size(); ++d) {
    const Point& t = drone_targets[d];
    s.buildings.push_back(box_building(static_cast<BuildingId>(d + 1), t.x - 10, t.y + 10, t.x + 10, t.y + 30, 10, t));
  }
  FleetConfig f;
  f.truck_speed = 10;
  f.truck_service = 60;
  f.drone_speed = drone_speed;
  f.drone_service = drone_service;
  f.drone_count = static_cast<std::uint32_t>(drone_targets.size());

  HybridPlan& plan = out.plan;
  plan.fleet = f;
  DeliverySet set;
  set.jobs.push_back({0, 0, s.buildings[0].access_point, Category::Standard});
  for (std::size_t d = 0; d < drone_targets.size(); ++d) {
    const auto id = static_cast<JobId>(d + 1);
    set.jobs.push_back({id, id, drone_targets[d], Category::Standard});
  }
  plan.jobs = set.jobs;
  const std::vector<JobId> stops{0};
  plan.truck = build_truck_schedule(s, set, stops, f);
  for (std::size_t d = 0; d < drone_targets.size(); ++d) {
    const SortieResult r =
        compute_sortie(plan.truck, 0, set.jobs[d + 1], 0, f, s, static_cast<DroneId>(d));
    plan.sorties.push_back(std::get<Sortie>(r));
  }
  plan.completion = plan_timeline(plan);
  return out;
}

// Small random grid instance for property tests.
struct RandomInstance {
  Scenario scenario;
  DeliverySet set;
  FleetConfig fleet;
};

inline RandomInstance random_instance(std::uint64_t seed, std::uint32_t max_drones = 3) {
  Rng rng(seed);
  GridParams g;
  g.rows = static_cast<std::uint32_t>(rng.between(2, 5));
  g.cols = static_cast<std::uint32_t>(rng.between(2, 5));
  g.spacing = rng.uniform(60, 200);
  g.buildings_per_cell = static_cast<std::uint32_t>(rng.between(1, 3));
  g.seed = rng.next_u64();
  RandomInstance inst;
  inst.scenario = generate_grid_scenario(g);
  JobParams jp;
  jp.n_sets = 1;
  jp.per_set = static_cast<std::uint32_t>(rng.between(1, 9));
  jp.medical_per_set = static_cast<std::uint32_t>(rng.between(0, jp.per_set));
  jp.seed = rng.next_u64();
  inst.set = generate_delivery_sets(inst.scenario, jp).front();
  inst.fleet.drone_count = static_cast<std::uint32_t>(rng.between(0, max_drones));
  inst.fleet.truck_speed = rng.uniform(5, 15);
  inst.fleet.truck_service = rng.uniform(0, 90);
  inst.fleet.drone_speed = rng.uniform(8, 25);
  inst.fleet.drone_endurance = rng.uniform(60, 900);
  inst.fleet.drone_service = rng.uniform(0, 60);
  inst.fleet.turnaround = rng.uniform(1, 120);
  return inst;
}

}  // namespace hyfleet::testing
