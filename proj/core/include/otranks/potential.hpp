#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "otranks/geometry.hpp"
#include "otranks/reference_measure.hpp"
#include "otranks/types.hpp"

namespace otranks {

/// Absolute slack used to decide which affine pieces are active at a point.
inline constexpr double kActiveSlack = 1e-12;

/// psi(u) = max_i { <u, X_i> + h_i }, a convex piecewise-affine potential.
///
/// Weights are kept in the gauge sum(h) = 0. Sites are shared between copies,
/// so re-weighting (as the solver does every iteration) does not copy them.
class PiecewiseAffinePotential {
 public:
  /// Validates sites (n >= 1, pairwise distinct) and re-gauges the weights.
  PiecewiseAffinePotential(PointSet sites, std::vector<double> weights);

  /// Validates like the constructor but keeps the weights bit-for-bit; they must
  /// already sum to zero up to rounding. Used when reloading stored models.
  static PiecewiseAffinePotential from_gauged(PointSet sites, std::vector<double> weights);

  /// Same sites, new weights (re-gauged). Skips the duplicate check.
  PiecewiseAffinePotential with_weights(std::vector<double> weights) const;

  std::size_t size() const noexcept { return weights_.size(); }
  std::size_t dim() const noexcept { return sites_->points.dim(); }
  const PointSet& sites() const noexcept { return sites_->points; }
  std::span<const double> site(std::size_t i) const { return sites_->points[i]; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  struct Evaluation {
    double value = 0.0;
    std::vector<std::size_t> active;  // indices within kActiveSlack of the max
  };
  Evaluation eval(std::span<const double> u) const;

  /// max_i { <u, X_i> + h_i } without the active set.
  double value(std::span<const double> u) const;

  /// Lowest index attaining the maximum (within kActiveSlack).
  std::size_t assign(std::span<const double> u) const;

  /// Value of the Legendre conjugate at site i: -h_i.
  double conjugate_at_site(std::size_t i) const;

  /// For each site, up to `kNearSites` other sites ordered by Euclidean distance
  /// (row-major, `near_count()` entries per site). Computed once per site set.
  static constexpr std::size_t kNearSites = 24;
  std::span<const std::uint32_t> near_sites(std::size_t i) const;
  std::size_t near_count() const;

 private:
  struct Sites {
    PointSet points;
    mutable std::once_flag near_once;
    mutable std::vector<std::uint32_t> near;
  };

  PiecewiseAffinePotential(std::shared_ptr<const Sites> sites, std::vector<double> weights, bool gauge = true);

  std::shared_ptr<const Sites> sites_;
  std::vector<double> weights_;
};

/// Subtracts the mean so the weights sum to zero.
void regauge(std::vector<double>& weights);

/// One cell W_i of the decomposition of S induced by the potential.
struct PowerCell {
  std::size_t site = 0;
  Polygon polygon;             // d = 2: counterclockwise vertices, empty if the cell has no area
  std::vector<int> neighbors;  // d = 2: site across the edge from vertex k to k+1, -1 on the square's boundary
  double lower = 0.0;          // d = 1: interval [lower, upper]
  double upper = 0.0;
  double measure = 0.0;        // mu-mass (length or area)
  Point2 centroid;             // d = 2 centroid; d = 1 midpoint in .x
};

/// Cells of a d = 1 potential on [0,1], indexed by site. Empty cells have zero length.
std::vector<PowerCell> cells_1d(const PiecewiseAffinePotential& potential, const ReferenceMeasure& measure);

/// Cells of a d = 2 potential clipped to [0,1]^2, indexed by site.
std::vector<PowerCell> cells_2d(const PiecewiseAffinePotential& potential, const ReferenceMeasure& measure);

}  // namespace otranks
