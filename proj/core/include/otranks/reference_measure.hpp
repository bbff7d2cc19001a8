#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "otranks/rng.hpp"
#include "otranks/types.hpp"

namespace otranks {

enum class ReferenceKind { unit_cube, unit_ball, spherical_uniform };

/// Closed halfspace {u : <normal, u> <= offset}.
struct Halfspace {
  Vector normal;
  double offset = 0.0;
};

/// Reference distribution mu on a compact convex support S.
///
///  - unit_cube:         Uniform([0,1]^d)
///  - unit_ball:         Uniform(B_1(0))
///  - spherical_uniform: L * phi with L ~ U[0,1] and phi uniform on the sphere;
///                       supported on the unit ball but not uniform there.
class ReferenceMeasure {
 public:
  ReferenceMeasure(ReferenceKind kind, std::size_t dim);

  static ReferenceMeasure cube(std::size_t dim) { return {ReferenceKind::unit_cube, dim}; }
  static ReferenceMeasure ball(std::size_t dim) { return {ReferenceKind::unit_ball, dim}; }
  static ReferenceMeasure spherical(std::size_t dim) { return {ReferenceKind::spherical_uniform, dim}; }

  ReferenceKind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return dim_; }
  bool is_cube() const noexcept { return kind_ == ReferenceKind::unit_cube; }

  PointSet sample(std::size_t count, RandomStream& rng) const;
  void sample_into(std::span<double> out, RandomStream& rng) const;

  bool contains(std::span<const double> point) const;

  /// Facets of S, or nullopt when S is not a polytope.
  std::optional<std::vector<Halfspace>> support_halfspaces() const;

  /// Euclidean projection onto S.
  void project(std::span<double> point) const;

  double diameter() const;

  /// Name used in model files: "cube", "ball" or "spherical".
  std::string_view name() const noexcept;
  static ReferenceKind parse_kind(std::string_view name);

  friend bool operator==(const ReferenceMeasure&, const ReferenceMeasure&) = default;

 private:
  ReferenceKind kind_;
  std::size_t dim_;
};

}  // namespace otranks
