// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "../support/oracles.hpp"
#include "hyfleet/experiment.hpp"
#include "hyfleet/hybrid.hpp"
#include "hyfleet/jobs.hpp"
#include "hyfleet/metrics.hpp"
#include "hyfleet/netmodel.hpp"
#include "hyfleet/rng.hpp"
#include "hyfleet/routing.hpp"
#include "hyfleet/scenario.hpp"
#include "hyfleet/simcore.hpp"

using namespace hyfleet;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const Outcome& o) {
  std::printf("[%s] %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string fmt(const char* spec, double a) {
  char buf[256];
  std::snprintf(buf, sizeof buf, spec, a);
  return buf;
}

double mean_of(const SweepSummary& s, std::uint32_t drones, bool prio, StatCategory c) {
  const SummaryRow* r = s.find(drones, prio, c);
  return r ? r->mean : std::nan("");
}

// Shared by criteria 2, 3 and 9.
struct DefaultSweep {
  ExperimentResult result;
  double seconds = 0;
};

DefaultSweep run_default_sweep() {
  const auto t0 = Clock::now();
  DefaultSweep s{run_experiment(ExperimentConfig{}), 0};
  s.seconds = seconds_since(t0);
  return s;
}

Outcome prioritization_benefit() {
  ExperimentConfig cfg;
  cfg.drone_counts = {0};
  cfg.net_models.clear();
  const auto t0 = Clock::now();
  const ExperimentResult r = run_experiment(cfg);
  const double secs = seconds_since(t0);
  if (!r.failures.empty() || !r.summary) return {false, "sweep had failed runs"};
  const double base = mean_of(*r.summary, 0, false, StatCategory::Medical);
  const double prio = mean_of(*r.summary, 0, true, StatCategory::Medical);
  const double ratio = prio / base;
  Outcome o;
  o.pass = ratio <= 0.60 && secs < 60.0;
  o.detail = "medical mean " + fmt("%.1f", base) + " s -> " + fmt("%.1f", prio) + " s, ratio " +
             fmt("%.3f", ratio) + " (<= 0.60), " + fmt("%.2f", secs) + " s (< 60 s)";
  return o;
}

Outcome standard_penalty(const SweepSummary& s) {
  const double baseline = mean_of(s, 0, false, StatCategory::Standard);
  std::vector<double> excess;
  for (std::uint32_t d = 0; d <= 5; ++d) {
    excess.push_back((mean_of(s, d, true, StatCategory::Standard) - baseline) / baseline);
  }
  bool monotone = true;
  for (std::size_t d = 1; d < excess.size(); ++d) monotone &= excess[d] <= excess[d - 1] + 0.05;
  Outcome o;
  o.pass = excess[0] > 0.0 && monotone && excess[5] <= 0.10;
  o.detail = "excess over truck-only baseline by drones:";
  for (double e : excess) o.detail += fmt(" %+.1f%%", 100 * e);
  o.detail += std::string("; positive at 0: ") + (excess[0] > 0 ? "yes" : "no") +
              ", monotone within 5%/step: " + (monotone ? "yes" : "no") + ", at 5 <= 10%: " +
              (excess[5] <= 0.10 ? "yes" : "no");
  return o;
}

Outcome capacity_trend(const SweepSummary& s) {
  int inversions = 0;
  bool small = true;
  std::string detail;
  for (bool prio : {false, true}) {
    detail += prio ? "; prioritized" : "unprioritized";
    double prev = -1;
    for (std::uint32_t d = 0; d <= 5; ++d) {
      const double c = s.find(d, prio, StatCategory::All)->capacity_20min;
      detail += fmt(" %.3f", c);
      if (prev >= 0 && c < prev) {
        ++inversions;
        small &= prev - c <= 0.02;
      }
      prev = c;
    }
  }
  Outcome o;
  o.pass = inversions == 0 || (inversions == 1 && small);
  o.detail = "capacity at 20 min, " + detail + "; inversions " + std::to_string(inversions);
  return o;
}

Outcome network_ordering(const ExperimentResult& r) {
  std::map<std::string, const NetStats*> by;
  for (const NetStats& n : r.net) by[n.model] = &n;
  if (by.size() != 3) return {false, "network models missing"};
  auto median = [](const NetStats* n) {
    const auto l = n->latencies();
    return l.empty() ? std::nan("") : quantile(l, 0.5);
  };
  const double m_cen = median(by["centralized"]);
  const double m_csma = median(by["csma"]);
  const double m_sps = median(by["sps"]);
  const double p_csma = by["csma"]->pdr();
  const double p_sps = by["sps"]->pdr();
  const RequirementsReport cen = check_requirements(*by["centralized"]);
  const std::size_t fleet = r.net_run->drones + 1;

  const bool lat_cen_csma = m_cen > m_csma;
  const bool lat_csma_sps = m_csma > m_sps;
  const bool pdr_order = p_sps >= p_csma;
  const bool pdr_floor = p_csma >= 0.99;
  Outcome o;
  o.pass = lat_cen_csma && lat_csma_sps && pdr_order && pdr_floor && fleet <= 7;
  o.detail = "median latency ms centralized " + fmt("%.3f", m_cen) + (lat_cen_csma ? " > " : " !> ") + "csma " +
             fmt("%.3f", m_csma) + (lat_csma_sps ? " > " : " !> ") + "sps " + fmt("%.3f", m_sps) + "; pdr sps " +
             fmt("%.4f", p_sps) + (pdr_order ? " >= " : " < ") + "csma " + fmt("%.4f", p_csma) +
             (pdr_floor ? " >= " : " < ") + "0.99; fleet " + std::to_string(fleet) + " (<= 7)" +
             "; centralized p95 " + fmt("%.2f", cen.p95_latency) + " ms vs 50 ms bound: " +
             (cen.cc_latency_ok ? "within (reported)" : "exceeded (reported)");
  return o;
}

Outcome tsp_oracle() {
  const auto t0 = Clock::now();
  Rng rng(20240501);
  int mismatches = 0;
  double ratio_sum = 0;
  int counted = 0;
  for (int i = 0; i < 200; ++i) {
    const auto n = static_cast<std::size_t>(rng.between(2, 8));
    // Integer costs keep every tour sum exact, so equality is meaningful.
    std::vector<Point> pts(n);
    for (Point& p : pts) p = {static_cast<double>(rng.between(0, 1000)), static_cast<double>(rng.between(0, 1000)), 0};
    CostMatrix m(n);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) m(a, b) = std::round(distance2d(pts[a], pts[b]));
    }
    const TspResult exact = tsp_exact(m, 0, true);
    const oracle::TspAnswer want = oracle::tsp_enumerate(m, 0, true);
    if (exact.cost != want.cost || exact.order != want.order) ++mismatches;
    const TspResult heur = tsp_heuristic(m, 0, true);
    if (want.cost > 0) {
      ratio_sum += heur.cost / want.cost;
      ++counted;
    }
  }
  const double secs = seconds_since(t0);
  const double mean_ratio = ratio_sum / counted;
  Outcome o;
  o.pass = mismatches == 0 && mean_ratio <= 1.10 && secs < 30.0;
  o.detail = std::to_string(mismatches) + " mismatches vs enumeration over 200 instances, heuristic mean " +
             fmt("%.4f", mean_ratio) + " x optimal (<= 1.10), " + fmt("%.2f", secs) + " s (< 30 s)";
  return o;
}

struct RandomInstance {
  Scenario scenario;
  DeliverySet set;
  FleetConfig fleet;
  bool prioritize;
};

RandomInstance random_instance(std::uint64_t seed) {
  Rng rng(seed);
  GridParams g;
  g.rows = static_cast<std::uint32_t>(rng.between(2, 6));
  g.cols = static_cast<std::uint32_t>(rng.between(2, 6));
  g.spacing = rng.uniform(50, 200);
  g.buildings_per_cell = static_cast<std::uint32_t>(rng.between(1, 3));
  g.seed = rng.next_u64();
  RandomInstance inst;
  inst.scenario = generate_grid_scenario(g);
  JobParams jp;
  jp.n_sets = 1;
  jp.per_set = static_cast<std::uint32_t>(rng.between(1, 12));
  jp.medical_per_set = static_cast<std::uint32_t>(rng.between(0, jp.per_set));
  jp.seed = rng.next_u64();
  inst.set = generate_delivery_sets(inst.scenario, jp).front();
  inst.fleet.drone_count = static_cast<std::uint32_t>(rng.between(0, 5));
  inst.fleet.truck_speed = rng.uniform(4, 15);
  inst.fleet.truck_service = rng.uniform(0, 120);
  inst.fleet.drone_speed = rng.uniform(6, 25);
  inst.fleet.drone_endurance = rng.uniform(30, 1200);
  inst.fleet.drone_service = rng.uniform(0, 60);
  inst.fleet.turnaround = rng.uniform(1, 120);
  inst.prioritize = rng.bernoulli(0.5);
  return inst;
}

Outcome planner_simulator_agreement() {
  double worst = 0;
  std::size_t jobs = 0, sorties = 0;
  std::string error;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const RandomInstance inst = random_instance(derive_seed(6, {i}));
    try {
      const HybridPlan plan = plan_hybrid(inst.scenario, inst.set, inst.fleet, inst.prioritize);
      const DeliveryTrace trace = simulate(inst.scenario, plan, inst.fleet);
      sorties += plan.sorties.size();
      for (const auto& [job, t] : plan.completion) {
        worst = std::max(worst, std::abs(trace.completion.at(job) - t));
        ++jobs;
      }
    } catch (const std::exception& e) {
      error = "instance " + std::to_string(i) + ": " + e.what();
      break;
    }
  }
  Outcome o;
  o.pass = error.empty() && worst <= 1e-6;
  o.detail = error.empty() ? "max |planned - simulated| " + fmt("%.3g", worst) + " s over " + std::to_string(jobs) +
                                 " jobs (" + std::to_string(sorties) + " sorties) in 100 plans (<= 1e-6)"
                           : error;
  return o;
}

// Checks the plan invariants directly from the plan data, independently of
// the library's own checker; returns the number of violations.
std::size_t independent_violations(const RandomInstance& inst, const HybridPlan& plan) {
  std::size_t v = 0;
  const FleetConfig& f = inst.fleet;
  std::map<JobId, int> served;
  for (JobId j : plan.truck.stops) ++served[j];
  for (const Sortie& s : plan.sorties) ++served[s.job];
  for (const DeliveryJob& j : inst.set.jobs) v += served[j.id] != 1;
  v += served.size() != inst.set.jobs.size();

  std::map<DroneId, std::vector<const Sortie*>> per_drone;
  for (const Sortie& s : plan.sorties) {
    per_drone[s.drone].push_back(&s);
    v += s.drone >= f.drone_count;
    v += s.airborne() > f.drone_endurance + 1e-9;
    v += !(s.launch_index < s.rendezvous_index);
    v += s.rendezvous_index >= plan.truck.visits.size();
    if (s.rendezvous_index >= plan.truck.visits.size()) continue;
    const TruckVisit& lv = plan.truck.visits[s.launch_index];
    const TruckVisit& rv = plan.truck.visits[s.rendezvous_index];
    v += s.launch_node != lv.node || s.rendezvous_node != rv.node;
    // Drone leaves while the truck is at the launch node and meets it while
    // it is at the rendezvous node (the final depot visit has no deadline).
    v += s.launch_time < lv.arrive - 1e-9 || s.launch_time > lv.depart + 1e-9;
    v += s.rendezvous_time < rv.arrive - 1e-9;
    if (s.rendezvous_index + 1 < plan.truck.visits.size()) v += s.rendezvous_time > rv.depart + 1e-9;
    const double flight = (distance2d(inst.scenario.graph.node(s.launch_node), s.target) +
                           distance2d(s.target, inst.scenario.graph.node(s.rendezvous_node))) /
                          f.drone_speed;
    v += std::abs(s.airborne() - (flight + f.drone_service + s.hover_wait)) > 1e-6;
    v += s.hover_wait < -1e-9;
  }
  for (auto& [d, list] : per_drone) {
    std::sort(list.begin(), list.end(), [](const Sortie* a, const Sortie* b) { return a->launch_time < b->launch_time; });
    for (std::size_t k = 1; k < list.size(); ++k) {
      v += list[k]->launch_time < list[k - 1]->rendezvous_time + f.turnaround - 1e-9;
    }
  }
  if (inst.prioritize) {
    bool standard_seen = false;
    for (JobId j : plan.truck.stops) {
      const bool medical = inst.set.job(j).category == Category::Medical;
      v += medical && standard_seen;
      standard_seen |= !medical;
    }
  }
  return v;
}

Outcome plan_feasibility() {
  std::size_t violations = 0, library = 0, sorties = 0;
  std::string first;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const RandomInstance inst = random_instance(derive_seed(7, {i}));
    try {
      const HybridPlan plan = plan_hybrid(inst.scenario, inst.set, inst.fleet, inst.prioritize);
      sorties += plan.sorties.size();
      const std::size_t v = independent_violations(inst, plan);
      const auto lib = check_plan(plan, inst.scenario);
      violations += v;
      library += lib.size();
      if ((v > 0 || !lib.empty()) && first.empty()) {
        first = "instance " + std::to_string(i) + (lib.empty() ? std::string() : ": " + lib.front());
      }
    } catch (const std::exception& e) {
      ++violations;
      if (first.empty()) first = "instance " + std::to_string(i) + " threw: " + e.what();
    }
  }
  Outcome o;
  o.pass = violations == 0 && library == 0;
  o.detail = std::to_string(violations) + " invariant violations (" + std::to_string(library) +
             " from the plan checker) over 1000 plans with " + std::to_string(sorties) + " sorties" +
             (first.empty() ? "" : "; first: " + first);
  return o;
}

Outcome spatial_distribution() {
  const Scenario s = generate_grid_scenario({});
  const auto sets = generate_delivery_sets(s, {});
  std::vector<double> targets;
  for (const DeliverySet& set : sets) {
    std::vector<Point> pts;
    for (const DeliveryJob& j : set.jobs) pts.push_back(j.target);
    const auto d = ipd_distribution(pts);
    targets.insert(targets.end(), d.begin(), d.end());
  }
  std::sort(targets.begin(), targets.end());
  std::vector<Point> access;
  for (const Building& b : s.buildings) access.push_back(b.access_point);
  const auto buildings = ipd_distribution(access);
  const double ks = ks_statistic(targets, buildings);
  Outcome o;
  o.pass = ks <= 0.1;
  o.detail = "KS(delivery IPD, building IPD) = " + fmt("%.4f", ks) + " over " + std::to_string(sets.size()) +
             " sets (<= 0.1)";
  return o;
}

Outcome determinism(const DefaultSweep& first) {
  const DefaultSweep second = run_default_sweep();
  const std::string a = summary_csv(*first.result.summary);
  const std::string b = summary_csv(*second.result.summary);
  Outcome o;
  o.pass = a == b && !a.empty();
  o.detail = std::string("summary CSV ") + (a == b ? "byte-identical" : "differs") + " across two default sweeps (" +
             std::to_string(a.size()) + " bytes, " + fmt("%.2f", first.seconds) + " s and " +
             fmt("%.2f", second.seconds) + " s)";
  return o;
}

}  // namespace

int main() {
  report(1, "prioritization benefit", prioritization_benefit());

  const DefaultSweep sweep = run_default_sweep();
  if (!sweep.result.summary || !sweep.result.failures.empty()) {
    std::printf("default sweep failed: %zu failed runs\n", sweep.result.failures.size());
    return 1;
  }
  report(2, "standard penalty and drone compensation", standard_penalty(*sweep.result.summary));
  report(3, "capacity trend", capacity_trend(*sweep.result.summary));
  report(4, "network ordering", network_ordering(sweep.result));
  report(5, "tsp oracle equivalence", tsp_oracle());
  report(6, "planner-simulator agreement", planner_simulator_agreement());
  report(7, "plan feasibility", plan_feasibility());
  report(8, "spatial distribution", spatial_distribution());
  report(9, "determinism", determinism(sweep));

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
