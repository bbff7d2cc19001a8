#include "otranks/geometry.hpp"

#include <algorithm>

#include <cmath>

#include "otranks/types.hpp"

namespace otranks {

Polygon unit_square() { return {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}; }

void clip_halfplane_into(const Polygon& poly, double a, double b, double c, Polygon& out) {
  out.clear();
  const std::size_t n = poly.size();
  if (n == 0) return;
  Point2 prev = poly[n - 1];
  double fprev = a * prev.x + b * prev.y + c;
  for (std::size_t k = 0; k < n; ++k) {
    const Point2 cur = poly[k];
    const double fcur = a * cur.x + b * cur.y + c;
    if (fcur >= 0.0) {
      if (fprev < 0.0 && fcur > 0.0) {
        const double t = fprev / (fprev - fcur);
        out.push_back({prev.x + t * (cur.x - prev.x), prev.y + t * (cur.y - prev.y)});
      }
      out.push_back(cur);
    } else if (fprev > 0.0) {
      const double t = fprev / (fprev - fcur);
      out.push_back({prev.x + t * (cur.x - prev.x), prev.y + t * (cur.y - prev.y)});
    }
    prev = cur;
    fprev = fcur;
  }
  if (out.size() < 3) out.clear();
}

void clip_halfplane_labeled(const Polygon& poly, const std::vector<int>& labels, double a, double b, double c,
                            int label, Polygon& out, std::vector<int>& out_labels) {
  out.clear();
  out_labels.clear();
  const std::size_t n = poly.size();
  if (n == 0) return;
  // out_labels first holds the label of the edge entering each vertex.
  Point2 prev = poly[n - 1];
  double fprev = a * prev.x + b * prev.y + c;
  for (std::size_t k = 0; k < n; ++k) {
    const Point2 cur = poly[k];
    const double fcur = a * cur.x + b * cur.y + c;
    const int edge = labels[k == 0 ? n - 1 : k - 1];
    if (fcur >= 0.0) {
      if (fprev < 0.0 && fcur > 0.0) {
        const double t = fprev / (fprev - fcur);
        out.push_back({prev.x + t * (cur.x - prev.x), prev.y + t * (cur.y - prev.y)});
        out_labels.push_back(label);
        out.push_back(cur);
        out_labels.push_back(edge);
      } else {
        out.push_back(cur);
        out_labels.push_back(fprev < 0.0 ? label : edge);
      }
    } else if (fprev > 0.0) {
      const double t = fprev / (fprev - fcur);
      out.push_back({prev.x + t * (cur.x - prev.x), prev.y + t * (cur.y - prev.y)});
      out_labels.push_back(edge);
    }
    prev = cur;
    fprev = fcur;
  }
  if (out.size() < 3) {
    out.clear();
    out_labels.clear();
    return;
  }
  std::rotate(out_labels.begin(), out_labels.begin() + 1, out_labels.end());
}

Polygon clip_halfplane(const Polygon& poly, double a, double b, double c) {
  Polygon out;
  out.reserve(poly.size() + 1);
  clip_halfplane_into(poly, a, b, c, out);
  return out;
}

Polygon intersect_convex(const Polygon& subject, const Polygon& clip) {
  Polygon out = subject;
  const std::size_t m = clip.size();
  for (std::size_t e = 0; e < m && !out.empty(); ++e) {
    const Point2 p = clip[e];
    const Point2 q = clip[(e + 1) % m];
    // Left of p->q is inside for a counterclockwise clip polygon.
    const double a = -(q.y - p.y);
    const double b = q.x - p.x;
    out = clip_halfplane(out, a, b, -(a * p.x + b * p.y));
  }
  return out;
}

AreaCentroid polygon_area_centroid(std::span<const Point2> v) {
  if (v.size() < 3) throw InputError("polygon needs at least three vertices");
  // Shift to the first vertex to limit cancellation.
  const Point2 o = v[0];
  double twice_area = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const Point2 p{v[k].x - o.x, v[k].y - o.y};
    const Point2 q{v[(k + 1) % v.size()].x - o.x, v[(k + 1) % v.size()].y - o.y};
    const double cr = p.x * q.y - q.x * p.y;
    twice_area += cr;
    cx += (p.x + q.x) * cr;
    cy += (p.y + q.y) * cr;
  }
  AreaCentroid out;
  out.area = 0.5 * std::abs(twice_area);
  if (twice_area == 0.0) {
    for (const auto& p : v) {
      out.centroid.x += p.x;
      out.centroid.y += p.y;
    }
    out.centroid.x /= static_cast<double>(v.size());
    out.centroid.y /= static_cast<double>(v.size());
    return out;
  }
  out.centroid = {o.x + cx / (3.0 * twice_area), o.y + cy / (3.0 * twice_area)};
  return out;
}

double polygon_area(std::span<const Point2> v) {
  if (v.size() < 3) return 0.0;
  const Point2 o = v[0];
  double twice_area = 0.0;
  for (std::size_t k = 1; k + 1 < v.size(); ++k) {
    twice_area += (v[k].x - o.x) * (v[k + 1].y - o.y) - (v[k + 1].x - o.x) * (v[k].y - o.y);
  }
  return 0.5 * std::abs(twice_area);
}

namespace {

double triangle_area(Point2 a, Point2 b, Point2 c) {
  return 0.5 * std::abs((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

double sq(Point2 u, Point2 p) { return (u.x - p.x) * (u.x - p.x) + (u.y - p.y) * (u.y - p.y); }

Point2 mid(Point2 a, Point2 b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }

}  // namespace

double integrate_squared_distance(std::span<const Point2> v, Point2 p) {
  if (v.size() < 3) return 0.0;
  double total = 0.0;
  for (std::size_t k = 1; k + 1 < v.size(); ++k) {
    const Point2 a = v[0], b = v[k], c = v[k + 1];
    const double area = triangle_area(a, b, c);
    total += area / 3.0 * (sq(mid(a, b), p) + sq(mid(b, c), p) + sq(mid(c, a), p));
  }
  return total;
}

Point2 sample_in_polygon(std::span<const Point2> v, RandomStream& rng) {
  if (v.size() < 3) throw InputError("cannot sample from a degenerate polygon");
  std::vector<double> cumulative;
  cumulative.reserve(v.size() - 2);
  double total = 0.0;
  for (std::size_t k = 1; k + 1 < v.size(); ++k) {
    total += triangle_area(v[0], v[k], v[k + 1]);
    cumulative.push_back(total);
  }
  if (!(total > 0.0)) throw NumericalError("cannot sample from a polygon with zero area");
  const double target = rng.uniform() * total;
  std::size_t t = 0;
  while (t + 1 < cumulative.size() && cumulative[t] <= target) ++t;
  const Point2 a = v[0], b = v[t + 1], c = v[t + 2];
  double r1 = rng.uniform();
  double r2 = rng.uniform();
  if (r1 + r2 > 1.0) {
    r1 = 1.0 - r1;
    r2 = 1.0 - r2;
  }
  return {a.x + r1 * (b.x - a.x) + r2 * (c.x - a.x), a.y + r1 * (b.y - a.y) + r2 * (c.y - a.y)};
}

bool polygon_contains(std::span<const Point2> v, Point2 p, double slack) {
  if (v.size() < 3) return false;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const Point2 a = v[k];
    const Point2 b = v[(k + 1) % v.size()];
    const double ex = b.x - a.x, ey = b.y - a.y;
    const double len = std::hypot(ex, ey);
    if (len == 0.0) continue;
    const double cross = (ex * (p.y - a.y) - ey * (p.x - a.x)) / len;
    if (cross < -slack) return false;
  }
  return true;
}

}  // namespace otranks
