#pragma once

// Reference implementations used to cross-check the library. Deliberately
// naive: brute force over every permutation or candidate.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "hyfleet/geometry.hpp"
#include "hyfleet/routing.hpp"

namespace hyfleet::oracle {

struct TspAnswer {
  std::vector<std::size_t> order;
  double cost = std::numeric_limits<double>::infinity();
};

// Enumerates all (n-1)! orders in lexicographic order; the first strict
// improvement wins, so ties resolve to the lexicographically smallest order.
inline TspAnswer tsp_enumerate(const CostMatrix& m, std::size_t start, bool closed) {
  const std::size_t n = m.size();
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < n; ++i) {
    if (i != start) rest.push_back(i);
  }
  TspAnswer best;
  do {
    std::vector<std::size_t> order{start};
    order.insert(order.end(), rest.begin(), rest.end());
    double c = 0;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) c += m(order[i], order[i + 1]);
    if (closed && n > 1) c += m(order.back(), start);
    if (c < best.cost) best = {order, c};
  } while (std::next_permutation(rest.begin(), rest.end()));
  return best;
}

// Random symmetric matrix from points in a box (metric).
template <class R>
CostMatrix random_euclidean(R& rng, std::size_t n, double extent = 1000.0) {
  std::vector<Point> pts(n);
  for (Point& p : pts) p = {rng.uniform(0, extent), rng.uniform(0, extent), 0};
  CostMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = distance2d(pts[i], pts[j]);
  }
  return m;
}

// Drone sortie on a straight road where the truck passes x at time x / v_t
// and parks at the last node. Tries every node after the launch node in
// order, each with a closed-form reachability test, and returns the first
// one the drone can meet.
struct LineSortie {
  double rendezvous_x = 0;
  double rendezvous_time = 0;
  double hover = 0;
};

inline std::optional<LineSortie> line_sortie(double launch_x, double spacing, std::size_t nodes, double v_truck,
                                             Point target, double v_drone, double service, double endurance) {
  const double t0 = launch_x / v_truck;
  const double out = distance2d({launch_x, 0, 0}, target) / v_drone;
  for (std::size_t k = 0; k < nodes; ++k) {
    const double x = static_cast<double>(k) * spacing;
    if (x <= launch_x) continue;
    const double truck = x / v_truck;
    if (truck - t0 > endurance) return std::nullopt;
    const double arrive = t0 + out + service + distance2d(target, {x, 0, 0}) / v_drone;
    const bool last = k + 1 == nodes;
    if (arrive > truck && !last) continue;
    const double meet = std::max(arrive, truck);
    if (meet - t0 > endurance) return std::nullopt;
    return LineSortie{x, meet, meet - arrive};
  }
  return std::nullopt;
}

}  // namespace hyfleet::oracle
