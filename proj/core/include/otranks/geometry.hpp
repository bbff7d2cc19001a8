#pragma once

#include <span>
#include <vector>

#include "otranks/rng.hpp"

namespace otranks {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Convex polygon, counterclockwise, no repeated closing vertex.
using Polygon = std::vector<Point2>;

Polygon unit_square();

/// Keeps the part of `poly` where a*x + b*y + c >= 0 (one Sutherland-Hodgman pass).
Polygon clip_halfplane(const Polygon& poly, double a, double b, double c);
/// Same, writing into `out` (which must not alias `poly`).
void clip_halfplane_into(const Polygon& poly, double a, double b, double c, Polygon& out);

/// clip_halfplane_into that also tracks edge labels: labels[k] tags the edge from
/// vertex k to vertex k+1, and edges created along the clip line get `label`.
void clip_halfplane_labeled(const Polygon& poly, const std::vector<int>& labels, double a, double b, double c,
                            int label, Polygon& out, std::vector<int>& out_labels);

/// Intersection of two convex polygons.
Polygon intersect_convex(const Polygon& subject, const Polygon& clip);

struct AreaCentroid {
  double area = 0.0;
  Point2 centroid;
};

/// Shoelace area and centroid. Requires at least three vertices; collinear
/// input has zero area and returns the vertex average as centroid.
AreaCentroid polygon_area_centroid(std::span<const Point2> vertices);

double polygon_area(std::span<const Point2> vertices);

/// Integral of |u - p|^2 over the polygon (exact: edge-midpoint rule per fan triangle).
double integrate_squared_distance(std::span<const Point2> vertices, Point2 p);

/// Uniform draw from a convex polygon with positive area.
Point2 sample_in_polygon(std::span<const Point2> vertices, RandomStream& rng);

/// Closed point-in-convex-polygon test with absolute slack.
bool polygon_contains(std::span<const Point2> vertices, Point2 p, double slack = 1e-12);

}  // namespace otranks
