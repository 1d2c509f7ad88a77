#include <benchmark/benchmark.h>

#include "hyfleet/hybrid.hpp"
#include "hyfleet/jobs.hpp"
#include "hyfleet/netmodel.hpp"
#include "hyfleet/rng.hpp"
#include "hyfleet/routing.hpp"
#include "hyfleet/scenario.hpp"
#include "hyfleet/simcore.hpp"

using namespace hyfleet;

namespace {

CostMatrix random_matrix(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Point> pts(n);
  for (Point& p : pts) p = {rng.uniform(0, 1000), rng.uniform(0, 1000), 0};
  CostMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = distance2d(pts[i], pts[j]);
  }
  return m;
}

struct Workload {
  Scenario scenario = generate_grid_scenario({});
  std::vector<DeliverySet> sets = generate_delivery_sets(scenario, {4, 15, 5, 42});
};

const Workload& workload() {
  static const Workload w;
  return w;
}

void BM_TspExact(benchmark::State& state) {
  const CostMatrix m = random_matrix(static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(tsp_exact(m, 0, false));
}
BENCHMARK(BM_TspExact)->DenseRange(6, 12, 2)->Unit(benchmark::kMicrosecond);

void BM_TspHeuristic(benchmark::State& state) {
  const CostMatrix m = random_matrix(static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(tsp_heuristic(m, 0, false));
}
BENCHMARK(BM_TspHeuristic)->RangeMultiplier(2)->Range(8, 128)->Unit(benchmark::kMicrosecond);

void BM_PlanHybrid(benchmark::State& state) {
  const Workload& w = workload();
  FleetConfig fleet;
  fleet.drone_count = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) {
    for (const DeliverySet& set : w.sets) benchmark::DoNotOptimize(plan_hybrid(w.scenario, set, fleet, true));
  }
}
BENCHMARK(BM_PlanHybrid)->DenseRange(0, 5)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  const Workload& w = workload();
  FleetConfig fleet;
  fleet.drone_count = 5;
  const HybridPlan plan = plan_hybrid(w.scenario, w.sets.front(), fleet, true);
  for (auto _ : state) benchmark::DoNotOptimize(simulate(w.scenario, plan, fleet));
}
BENCHMARK(BM_Simulate)->Unit(benchmark::kMicrosecond);

void BM_CamTraffic(benchmark::State& state) {
  const Workload& w = workload();
  FleetConfig fleet;
  fleet.drone_count = 5;
  const DeliveryTrace trace = simulate(w.scenario, plan_hybrid(w.scenario, w.sets.front(), fleet, true), fleet);
  const MacModel mac = parse_mac(state.range(0) == 0 ? "centralized" : state.range(0) == 1 ? "csma" : "sps");
  for (auto _ : state) benchmark::DoNotOptimize(run_cam_traffic(trace, w.scenario, mac, {}, {}));
  state.SetLabel(mac_name(mac));
}
BENCHMARK(BM_CamTraffic)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
