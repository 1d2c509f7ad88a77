#include "hyfleet/routing.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <queue>
#include <string>

#include "hyfleet/errors.hpp"

namespace hyfleet {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative tolerance used when comparing sums of travel times.
double tolerance(double v) { return 1e-9 * std::max(1.0, std::abs(v)); }

}  // namespace

std::vector<Seconds> travel_times_to(const RoadGraph& graph, NodeId to, MetersPerSecond max_speed) {
  if (!graph.has_node(to)) throw RoutingError("unknown node " + std::to_string(to));
  std::vector<Seconds> dist(graph.node_count(), kInf);
  using Entry = std::pair<Seconds, NodeId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  dist[to] = 0.0;
  queue.push({0.0, to});
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[u]) continue;
    for (const RoadGraph::Arc& arc : graph.arcs(u)) {
      const Seconds nd = d + edge_time(graph.edges()[arc.edge], max_speed);
      if (nd < dist[arc.to]) {
        dist[arc.to] = nd;
        queue.push({nd, arc.to});
      }
    }
  }
  return dist;
}

RoutedPath shortest_path(const RoadGraph& graph, NodeId from, NodeId to, MetersPerSecond max_speed) {
  if (!graph.has_node(from)) throw RoutingError("unknown node " + std::to_string(from));
  const std::vector<Seconds> dist = travel_times_to(graph, to, max_speed);
  if (!std::isfinite(dist[from])) {
    throw RoutingError("node " + std::to_string(to) + " unreachable from " + std::to_string(from));
  }

  // Walk forward taking the smallest-id neighbour that stays on a shortest
  // path; this yields the lexicographically smallest optimal sequence.
  RoutedPath path;
  path.nodes.push_back(from);
  std::vector<char> visited(graph.node_count(), 0);
  visited[from] = 1;
  NodeId u = from;
  while (u != to) {
    const RoadEdge* chosen = nullptr;
    NodeId next = u;
    for (const RoadGraph::Arc& arc : graph.arcs(u)) {
      if (visited[arc.to]) continue;
      const RoadEdge& e = graph.edges()[arc.edge];
      const Seconds via = edge_time(e, max_speed) + dist[arc.to];
      if (via <= dist[u] + tolerance(dist[u])) {
        chosen = &e;
        next = arc.to;
        break;
      }
    }
    if (chosen == nullptr) throw RoutingError("shortest path reconstruction failed");
    path.total_length += chosen->length;
    path.travel_time += edge_time(*chosen, max_speed);
    path.nodes.push_back(next);
    visited[next] = 1;
    u = next;
  }
  return path;
}

CostMatrix travel_time_matrix(const Scenario& scenario, std::span<const NodeId> stops, MetersPerSecond max_speed) {
  const std::size_t n = stops.size();
  CostMatrix m(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::vector<Seconds> dist = travel_times_to(scenario.graph, stops[j], max_speed);
    for (std::size_t i = 0; i < j; ++i) {
      if (!scenario.graph.has_node(stops[i])) throw RoutingError("unknown node " + std::to_string(stops[i]));
      m(i, j) = dist[stops[i]];
      m(j, i) = dist[stops[i]];
    }
  }
  return m;
}

double tour_cost(const CostMatrix& m, std::span<const std::size_t> order, bool closed) {
  double cost = 0.0;
  for (std::size_t k = 1; k < order.size(); ++k) cost += m(order[k - 1], order[k]);
  if (closed && order.size() > 1) cost += m(order.back(), order.front());
  return cost;
}

TspResult tsp_exact(const CostMatrix& m, std::size_t start, bool closed) {
  const std::size_t n = m.size();
  if (n > kExactTspLimit) {
    throw SizeError("tsp_exact supports at most " + std::to_string(kExactTspLimit) + " nodes, got " +
                    std::to_string(n));
  }
  if (start >= n) throw ParameterError("tsp start index out of range");
  if (n == 1) return {{start}, 0.0};

  std::vector<std::size_t> others;
  for (std::size_t i = 0; i < n; ++i) {
    if (i != start) others.push_back(i);
  }
  const std::size_t k = others.size();
  const std::size_t full = (std::size_t{1} << k) - 1;

  // remaining[mask * k + j]: cheapest completion having visited `mask`,
  // standing at others[j].
  std::vector<double> remaining((full + 1) * k, kInf);
  for (std::size_t j = 0; j < k; ++j) remaining[full * k + j] = closed ? m(others[j], start) : 0.0;
  for (std::size_t mask = full; mask-- > 1;) {
    for (std::size_t j = 0; j < k; ++j) {
      if (!(mask & (std::size_t{1} << j))) continue;
      double best = kInf;
      for (std::size_t t = 0; t < k; ++t) {
        if (mask & (std::size_t{1} << t)) continue;
        const std::size_t nm = mask | (std::size_t{1} << t);
        best = std::min(best, m(others[j], others[t]) + remaining[nm * k + t]);
      }
      remaining[mask * k + j] = best;
    }
  }

  double target = kInf;
  for (std::size_t t = 0; t < k; ++t) {
    target = std::min(target, m(start, others[t]) + remaining[(std::size_t{1} << t) * k + t]);
  }

  // Greedy forward reconstruction picks the smallest index at every step.
  TspResult result;
  result.order.push_back(start);
  std::size_t mask = 0;
  std::size_t here = start;
  double budget = target;
  while (mask != full) {
    bool advanced = false;
    for (std::size_t t = 0; t < k; ++t) {
      if (mask & (std::size_t{1} << t)) continue;
      const std::size_t nm = mask | (std::size_t{1} << t);
      const double via = m(here, others[t]) + remaining[nm * k + t];
      if (via <= budget + tolerance(budget)) {
        budget = remaining[nm * k + t];
        mask = nm;
        here = others[t];
        result.order.push_back(here);
        advanced = true;
        break;
      }
    }
    if (!advanced) throw Error("tsp_exact reconstruction failed");
  }
  result.cost = tour_cost(m, result.order, closed);
  return result;
}

TspResult tsp_heuristic(const CostMatrix& m, std::size_t start, bool closed) {
  const std::size_t n = m.size();
  if (n == 0) throw ParameterError("tsp_heuristic needs at least one node");
  if (start >= n) throw ParameterError("tsp start index out of range");

  std::vector<std::size_t> order{start};
  std::vector<char> used(n, 0);
  used[start] = 1;
  while (order.size() < n) {
    const std::size_t here = order.back();
    std::size_t best = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (!used[t] && (best == n || m(here, t) < m(here, best))) best = t;
    }
    used[best] = 1;
    order.push_back(best);
  }

  double cost = tour_cost(m, order, closed);
  std::vector<std::size_t> candidate;
  for (;;) {
    double best_cost = cost;
    std::size_t best_i = 0;
    std::size_t best_j = 0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        candidate = order;
        std::reverse(candidate.begin() + static_cast<std::ptrdiff_t>(i),
                     candidate.begin() + static_cast<std::ptrdiff_t>(j) + 1);
        const double c = tour_cost(m, candidate, closed);
        if (c < best_cost - tolerance(best_cost)) {
          best_cost = c;
          best_i = i;
          best_j = j;
        }
      }
    }
    if (best_j == 0) break;
    std::reverse(order.begin() + static_cast<std::ptrdiff_t>(best_i),
                 order.begin() + static_cast<std::ptrdiff_t>(best_j) + 1);
    cost = tour_cost(m, order, closed);
  }
  return {std::move(order), cost};
}

Solver parse_solver(std::string_view s) {
  if (s == "exact") return Solver::Exact;
  if (s == "heuristic") return Solver::Heuristic;
  throw ParameterError("unknown solver '" + std::string(s) + "'");
}

std::string_view to_string(Solver s) { return s == Solver::Exact ? "exact" : "heuristic"; }

NodeId job_node(const Scenario& scenario, const DeliveryJob& job) { return nearest_node(scenario, job.target); }

namespace {

// Open TSP over `jobs` starting at `origin`; returns jobs in visiting order.
std::vector<JobId> open_tsp(const Scenario& scenario, NodeId origin, std::span<const DeliveryJob> jobs,
                            Solver solver, MetersPerSecond max_speed) {
  if (jobs.empty()) return {};
  std::vector<NodeId> nodes{origin};
  for (const DeliveryJob& j : jobs) nodes.push_back(job_node(scenario, j));
  const CostMatrix m = travel_time_matrix(scenario, nodes, max_speed);
  const TspResult r = solver == Solver::Exact ? tsp_exact(m, 0, false) : tsp_heuristic(m, 0, false);
  std::vector<JobId> stops;
  for (std::size_t k = 1; k < r.order.size(); ++k) stops.push_back(jobs[r.order[k] - 1].id);
  return stops;
}

}  // namespace

Tour plain_schedule(const Scenario& scenario, const DeliverySet& set, Solver solver, MetersPerSecond max_speed) {
  return {scenario.depot, open_tsp(scenario, scenario.depot, set.jobs, solver, max_speed), true};
}

Tour priority_schedule(const Scenario& scenario, const DeliverySet& set, Solver solver, MetersPerSecond max_speed) {
  if (set.jobs.empty()) throw ParameterError("priority_schedule on an empty set");
  std::vector<DeliveryJob> medical;
  std::vector<DeliveryJob> standard;
  for (const DeliveryJob& j : set.jobs) (j.category == Category::Medical ? medical : standard).push_back(j);

  Tour tour{scenario.depot, open_tsp(scenario, scenario.depot, medical, solver, max_speed), true};
  const NodeId pivot = tour.stops.empty() ? scenario.depot : job_node(scenario, set.job(tour.stops.back()));
  for (JobId id : open_tsp(scenario, pivot, standard, solver, max_speed)) tour.stops.push_back(id);
  return tour;
}

}  // namespace hyfleet
