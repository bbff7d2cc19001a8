#include "otranks/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "otranks/parallel.hpp"

namespace otranks {

void regauge(std::vector<double>& weights) {
  if (weights.empty()) return;
  const double mean = std::accumulate(weights.begin(), weights.end(), 0.0) / static_cast<double>(weights.size());
  for (double& w : weights) w -= mean;
}

namespace {

void check_no_duplicates(const PointSet& sites) {
  std::vector<std::size_t> order(sites.size());
  std::iota(order.begin(), order.end(), 0);
  auto less = [&](std::size_t a, std::size_t b) {
    const auto pa = sites[a];
    const auto pb = sites[b];
    return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
  };
  std::sort(order.begin(), order.end(), less);
  for (std::size_t k = 1; k < order.size(); ++k) {
    const auto pa = sites[order[k - 1]];
    const auto pb = sites[order[k]];
    if (std::equal(pa.begin(), pa.end(), pb.begin())) {
      throw DataError("duplicate points at (1-based) rows " + std::to_string(std::min(order[k - 1], order[k]) + 1) + " and " +
                      std::to_string(std::max(order[k - 1], order[k]) + 1));
    }
  }
}

}  // namespace

PiecewiseAffinePotential::PiecewiseAffinePotential(PointSet sites, std::vector<double> weights)
    : weights_(std::move(weights)) {
  auto data = std::make_shared<Sites>();
  data->points = std::move(sites);
  sites_ = std::move(data);
  const PointSet& pts = sites_->points;
  if (pts.size() == 0) throw InputError("potential needs at least one site");
  if (weights_.size() != pts.size()) throw InputError("weight count does not match site count");
  for (double x : pts.data()) {
    if (!std::isfinite(x)) throw InputError("site coordinates must be finite");
  }
  for (double w : weights_) {
    if (!std::isfinite(w)) throw InputError("weights must be finite");
  }
  check_no_duplicates(pts);
  regauge(weights_);
}

PiecewiseAffinePotential::PiecewiseAffinePotential(std::shared_ptr<const Sites> sites, std::vector<double> weights,
                                                   bool gauge)
    : sites_(std::move(sites)), weights_(std::move(weights)) {
  if (gauge) regauge(weights_);
}

PiecewiseAffinePotential PiecewiseAffinePotential::from_gauged(PointSet sites, std::vector<double> weights) {
  std::vector<double> copy = weights;
  PiecewiseAffinePotential checked(std::move(sites), std::move(copy));
  double total = 0.0, scale = 0.0;
  for (double w : weights) {
    total += w;
    scale += std::abs(w);
  }
  if (std::abs(total) > 1e-9 * (1.0 + scale)) throw InputError("stored weights do not sum to zero");
  return PiecewiseAffinePotential(checked.sites_, std::move(weights), false);
}

PiecewiseAffinePotential PiecewiseAffinePotential::with_weights(std::vector<double> weights) const {
  if (weights.size() != size()) throw InputError("weight count does not match site count");
  return PiecewiseAffinePotential(sites_, std::move(weights));
}

double PiecewiseAffinePotential::value(std::span<const double> u) const {
  if (u.size() != dim()) throw DimensionMismatch(dim(), u.size());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < size(); ++i) best = std::max(best, dot(u, site(i)) + weights_[i]);
  return best;
}

PiecewiseAffinePotential::Evaluation PiecewiseAffinePotential::eval(std::span<const double> u) const {
  if (u.size() != dim()) throw DimensionMismatch(dim(), u.size());
  std::vector<double> planes(size());
  for (std::size_t i = 0; i < size(); ++i) planes[i] = dot(u, site(i)) + weights_[i];
  Evaluation out;
  out.value = *std::max_element(planes.begin(), planes.end());
  for (std::size_t i = 0; i < size(); ++i) {
    if (planes[i] >= out.value - kActiveSlack) out.active.push_back(i);
  }
  return out;
}

std::size_t PiecewiseAffinePotential::assign(std::span<const double> u) const {
  if (u.size() != dim()) throw DimensionMismatch(dim(), u.size());
  double best = -std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    const double v = dot(u, site(i)) + weights_[i];
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  // Lowest index within the slack of the maximum.
  for (std::size_t i = 0; i < arg; ++i) {
    if (dot(u, site(i)) + weights_[i] >= best - kActiveSlack) return i;
  }
  return arg;
}

double PiecewiseAffinePotential::conjugate_at_site(std::size_t i) const {
  if (i >= size()) throw InputError("site index out of range");
  return -weights_[i];
}

std::size_t PiecewiseAffinePotential::near_count() const {
  return std::min(kNearSites, size() - 1);
}

std::span<const std::uint32_t> PiecewiseAffinePotential::near_sites(std::size_t i) const {
  const std::size_t k = near_count();
  std::call_once(sites_->near_once, [&] {
    const PointSet& pts = sites_->points;
    const std::size_t n = pts.size();
    std::vector<std::uint32_t> near(n * k);
    parallel_for(n, [&](std::size_t a) {
      std::vector<std::pair<double, std::uint32_t>> d;
      d.reserve(n - 1);
      for (std::size_t b = 0; b < n; ++b) {
        if (b != a) d.emplace_back(squared_distance(pts[a], pts[b]), static_cast<std::uint32_t>(b));
      }
      std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
      for (std::size_t t = 0; t < k; ++t) near[a * k + t] = d[t].second;
    });
    sites_->near = std::move(near);
  });
  return {sites_->near.data() + i * k, k};
}

std::vector<PowerCell> cells_1d(const PiecewiseAffinePotential& potential, const ReferenceMeasure& measure) {
  if (potential.dim() != 1 || measure.dim() != 1 || !measure.is_cube()) {
    throw InputError("cells_1d requires d = 1 and the unit-interval reference");
  }
  const std::size_t n = potential.size();
  const auto& h = potential.weights();
  auto slope = [&](std::size_t i) { return potential.site(i)[0]; };

  std::vector<PowerCell> cells(n);
  for (std::size_t i = 0; i < n; ++i) cells[i].site = i;

  // Walk the upper envelope from u = 0 to u = 1. At u = 0 the largest intercept
  // wins, with ties going to the larger slope.
  std::size_t cur = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (h[i] > h[cur] || (h[i] == h[cur] && slope(i) > slope(cur))) cur = i;
  }
  double start = 0.0;
  for (;;) {
    double next_t = std::numeric_limits<double>::infinity();
    std::size_t next = cur;
    for (std::size_t j = 0; j < n; ++j) {
      if (slope(j) <= slope(cur)) continue;
      const double t = (h[cur] - h[j]) / (slope(j) - slope(cur));
      if (t < next_t || (t == next_t && slope(j) > slope(next))) {
        next_t = t;
        next = j;
      }
    }
    const double end = std::min(1.0, std::max(next_t, start));
    cells[cur].lower = start;
    cells[cur].upper = end;
    if (next == cur || end >= 1.0) break;
    start = end;
    cur = next;
  }
  for (auto& c : cells) {
    if (c.upper < c.lower) c.upper = c.lower;
    c.measure = c.upper - c.lower;
    c.centroid = {0.5 * (c.lower + c.upper), 0.0};
  }
  return cells;
}

std::vector<PowerCell> cells_2d(const PiecewiseAffinePotential& potential, const ReferenceMeasure& measure) {
  if (potential.dim() != 2 || measure.dim() != 2 || !measure.is_cube()) {
    throw InputError("cells_2d requires d = 2 and the unit-square reference");
  }
  const std::size_t n = potential.size();
  const auto& h = potential.weights();
  const auto& xs = potential.sites().data();
  if (n > 1) potential.near_sites(0);  // build the neighbour cache outside the parallel region

  std::vector<PowerCell> cells(n);
  parallel_for(n, [&](std::size_t i) {
    const double xi = xs[2 * i], yi = xs[2 * i + 1];
    Polygon poly = unit_square(), scratch;
    std::vector<int> labels(4, -1), scratch_labels;
    poly.reserve(16);
    scratch.reserve(16);
    // Bounding box of the current polygon.
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    auto clip_by = [&](std::size_t j) {
      const double a = xi - xs[2 * j];
      const double b = yi - xs[2 * j + 1];
      const double c = h[i] - h[j];
      if (c + std::min(a * x0, a * x1) + std::min(b * y0, b * y1) >= 0.0) return;
      bool all_inside = true;
      for (const auto& v : poly) {
        if (a * v.x + b * v.y + c < 0.0) {
          all_inside = false;
          break;
        }
      }
      if (all_inside) return;
      clip_halfplane_labeled(poly, labels, a, b, c, static_cast<int>(j), scratch, scratch_labels);
      poly.swap(scratch);
      labels.swap(scratch_labels);
      if (poly.empty()) return;
      x0 = x1 = poly[0].x;
      y0 = y1 = poly[0].y;
      for (const auto& v : poly) {
        x0 = std::min(x0, v.x);
        x1 = std::max(x1, v.x);
        y0 = std::min(y0, v.y);
        y1 = std::max(y1, v.y);
      }
    };
    // Nearby sites usually own the cell's edges; clipping by them first lets the
    // bounding-circle test dismiss almost every other site.
    if (n > 1) {
      for (std::uint32_t j : potential.near_sites(i)) {
        clip_by(j);
        if (poly.empty()) break;
      }
    }
    for (std::size_t j = 0; j < n && !poly.empty(); ++j) {
      if (j != i) clip_by(j);
    }
    PowerCell& cell = cells[i];
    cell.site = i;
    if (!poly.empty()) {
      // Start at the lexicographically smallest vertex so the listing does not
      // depend on the clipping order.
      const auto first = std::min_element(poly.begin(), poly.end(), [](const Point2& a, const Point2& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
      });
      std::rotate(labels.begin(), labels.begin() + (first - poly.begin()), labels.end());
      std::rotate(poly.begin(), first, poly.end());
      const AreaCentroid ac = polygon_area_centroid(poly);
      cell.measure = ac.area;
      cell.centroid = ac.centroid;
    }
    if (poly.empty()) labels.clear();
    cell.polygon = std::move(poly);
    cell.neighbors = std::move(labels);
  });
  return cells;
}

}  // namespace otranks
