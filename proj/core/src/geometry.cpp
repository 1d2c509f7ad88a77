#include "hyfleet/geometry.hpp"

#include <algorithm>
#include <limits>

namespace hyfleet {
namespace {

double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(const Point& a, const Point& b, const Point& p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

Meters point_segment_distance(const Point& a, const Point& b, const Point& p) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double s = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return std::hypot(a.x + s * dx - p.x, a.y + s * dy - p.y);
}

}  // namespace

double signed_area(std::span<const Point> poly) {
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point& p = poly[i];
    const Point& q = poly[(i + 1) % poly.size()];
    twice += p.x * q.y - q.x * p.y;
  }
  return 0.5 * twice;
}

Point centroid(std::span<const Point> poly) {
  const double area = signed_area(poly);
  if (poly.empty()) return {};
  if (area == 0.0) {
    Point c;
    for (const Point& p : poly) {
      c.x += p.x;
      c.y += p.y;
    }
    c.x /= static_cast<double>(poly.size());
    c.y /= static_cast<double>(poly.size());
    return c;
  }
  double cx = 0.0;
  double cy = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point& p = poly[i];
    const Point& q = poly[(i + 1) % poly.size()];
    const double w = p.x * q.y - q.x * p.y;
    cx += (p.x + q.x) * w;
    cy += (p.y + q.y) * w;
  }
  return {cx / (6.0 * area), cy / (6.0 * area), 0.0};
}

bool point_in_polygon(std::span<const Point> poly, const Point& p) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point& a = poly[i];
    const Point& b = poly[j];
    if (cross(a, b, p) == 0.0 && on_segment(a, b, p)) return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_at = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_at) inside = !inside;
    }
  }
  return inside;
}

bool segments_intersect(const Point& a, const Point& b, const Point& c, const Point& d) {
  const int d1 = sign(cross(c, d, a));
  const int d2 = sign(cross(c, d, b));
  const int d3 = sign(cross(a, b, c));
  const int d4 = sign(cross(a, b, d));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && on_segment(c, d, a)) return true;
  if (d2 == 0 && on_segment(c, d, b)) return true;
  if (d3 == 0 && on_segment(a, b, c)) return true;
  if (d4 == 0 && on_segment(a, b, d)) return true;
  return false;
}

bool is_simple_polygon(std::span<const Point> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % n];
    if (a.x == b.x && a.y == b.y) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point& c = poly[j];
      const Point& d = poly[(j + 1) % n];
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) {
        // Adjacent edges share one vertex; they must not fold back onto each other.
        const Point& shared = (j == i + 1) ? b : a;
        const Point& other_i = (j == i + 1) ? a : b;
        const Point& other_j = (j == i + 1) ? d : c;
        if (cross(shared, other_i, other_j) == 0.0) {
          const double dot = (other_i.x - shared.x) * (other_j.x - shared.x) +
                             (other_i.y - shared.y) * (other_j.y - shared.y);
          if (dot > 0.0) return false;
        }
        continue;
      }
      if (segments_intersect(a, b, c, d)) return false;
    }
  }
  return std::abs(signed_area(poly)) > 0.0;
}

Meters distance_to_boundary(std::span<const Point> poly, const Point& p) {
  Meters best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    best = std::min(best, point_segment_distance(poly[i], poly[(i + 1) % poly.size()], p));
  }
  return best;
}

}  // namespace hyfleet
