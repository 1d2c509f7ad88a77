#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "hyfleet/jobs.hpp"
#include "hyfleet/scenario.hpp"

namespace hyfleet {

struct RoutedPath {
  std::vector<NodeId> nodes;
  Meters total_length = 0.0;
  Seconds travel_time = 0.0;
};

// Edge traversal time for a vehicle capped at `max_speed`.
inline Seconds edge_time(const RoadEdge& e, MetersPerSecond max_speed) {
  return e.length / std::min(e.speed_limit, max_speed);
}

inline constexpr MetersPerSecond kNoSpeedCap = std::numeric_limits<double>::infinity();

// Minimum travel-time path. Among equal-time paths the lexicographically
// smallest node sequence is returned.
RoutedPath shortest_path(const RoadGraph& graph, NodeId from, NodeId to,
                         MetersPerSecond max_speed = kNoSpeedCap);

// Travel time from every node to `to` (Dijkstra on the undirected graph).
std::vector<Seconds> travel_times_to(const RoadGraph& graph, NodeId to,
                                     MetersPerSecond max_speed = kNoSpeedCap);

// Square row-major matrix.
class CostMatrix {
 public:
  CostMatrix() = default;
  explicit CostMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

// Symmetric shortest travel times between the given nodes, zero diagonal.
CostMatrix travel_time_matrix(const Scenario& scenario, std::span<const NodeId> stops,
                              MetersPerSecond max_speed = kNoSpeedCap);

struct TspResult {
  std::vector<std::size_t> order;  // starts with the start index
  double cost = 0.0;
};

// Cost of visiting `order` in sequence, plus the return leg when closed.
double tour_cost(const CostMatrix& m, std::span<const std::size_t> order, bool closed);

inline constexpr std::size_t kExactTspLimit = 12;

// Held-Karp. Throws SizeError for more than kExactTspLimit nodes.
TspResult tsp_exact(const CostMatrix& m, std::size_t start, bool closed);

// Nearest neighbour construction followed by 2-opt to a local optimum.
TspResult tsp_heuristic(const CostMatrix& m, std::size_t start, bool closed);

enum class Solver { Exact, Heuristic };

Solver parse_solver(std::string_view s);
std::string_view to_string(Solver s);

struct Tour {
  NodeId start = 0;
  std::vector<JobId> stops;
  bool closed = true;
};

// Road node serving each job (nearest node to its target).
NodeId job_node(const Scenario& scenario, const DeliveryJob& job);

// Open TSP over all jobs from the depot, closed by a return leg.
Tour plain_schedule(const Scenario& scenario, const DeliverySet& set, Solver solver,
                    MetersPerSecond max_speed = kNoSpeedCap);

// Medical jobs first as an open TSP from the depot; standard jobs as an open
// TSP from the last medical stop; then back to the depot.
Tour priority_schedule(const Scenario& scenario, const DeliverySet& set, Solver solver,
                       MetersPerSecond max_speed = kNoSpeedCap);

}  // namespace hyfleet
