#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace hyfleet {

using Meters = double;
using Seconds = double;
using MetersPerSecond = double;

// Local planar coordinates: x east, y north, z altitude. All in meters.
struct Point {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline Meters distance2d(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline Meters distance3d(const Point& a, const Point& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                   (a.z - b.z) * (a.z - b.z));
}

inline bool is_finite(const Point& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

// Linear interpolation, s in [0, 1].
inline Point lerp(const Point& a, const Point& b, double s) {
  return {a.x + (b.x - a.x) * s, a.y + (b.y - a.y) * s, a.z + (b.z - a.z) * s};
}

using Polygon = std::vector<Point>;

// Signed area in the xy-plane; positive for counter-clockwise winding.
double signed_area(std::span<const Point> poly);

Point centroid(std::span<const Point> poly);

// Even-odd rule; points on the boundary count as inside.
bool point_in_polygon(std::span<const Point> poly, const Point& p);

// Closed-segment intersection test in the xy-plane (touching counts).
bool segments_intersect(const Point& a, const Point& b, const Point& c, const Point& d);

// True if no two non-adjacent edges intersect and no adjacent edges overlap.
bool is_simple_polygon(std::span<const Point> poly);

// Distance from p to the polygon boundary in the xy-plane.
Meters distance_to_boundary(std::span<const Point> poly, const Point& p);

}  // namespace hyfleet
