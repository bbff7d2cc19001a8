#include "otranks/reference_measure.hpp"

#include <algorithm>
#include <cmath>

namespace otranks {

ReferenceMeasure::ReferenceMeasure(ReferenceKind kind, std::size_t dim) : kind_(kind), dim_(dim) {
  if (dim == 0) throw InputError("reference dimension must be at least 1");
}

void ReferenceMeasure::sample_into(std::span<double> out, RandomStream& rng) const {
  if (out.size() != dim_) throw DimensionMismatch(dim_, out.size());
  if (kind_ == ReferenceKind::unit_cube) {
    for (double& x : out) x = rng.uniform();
    return;
  }
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& x : out) {
      x = rng.normal();
      norm2 += x * x;
    }
  } while (norm2 == 0.0);
  const double u = rng.uniform();
  const double radius = kind_ == ReferenceKind::unit_ball ? std::pow(u, 1.0 / static_cast<double>(dim_)) : u;
  const double scale = radius / std::sqrt(norm2);
  for (double& x : out) x *= scale;
  project(out);  // guards against a norm of 1 + ulp
}

PointSet ReferenceMeasure::sample(std::size_t count, RandomStream& rng) const {
  std::vector<double> coords(count * dim_);
  for (std::size_t i = 0; i < count; ++i) sample_into({coords.data() + i * dim_, dim_}, rng);
  return PointSet(dim_, std::move(coords));
}

bool ReferenceMeasure::contains(std::span<const double> point) const {
  if (point.size() != dim_) throw DimensionMismatch(dim_, point.size());
  if (kind_ == ReferenceKind::unit_cube) {
    return std::all_of(point.begin(), point.end(), [](double x) { return x >= 0.0 && x <= 1.0; });
  }
  double norm2 = 0.0;
  for (double x : point) norm2 += x * x;
  return norm2 <= 1.0;
}

std::optional<std::vector<Halfspace>> ReferenceMeasure::support_halfspaces() const {
  if (kind_ != ReferenceKind::unit_cube) return std::nullopt;
  std::vector<Halfspace> out;
  out.reserve(2 * dim_);
  for (std::size_t j = 0; j < dim_; ++j) {
    Halfspace lower{Vector(dim_, 0.0), 0.0};
    lower.normal[j] = -1.0;
    Halfspace upper{Vector(dim_, 0.0), 1.0};
    upper.normal[j] = 1.0;
    out.push_back(std::move(lower));
    out.push_back(std::move(upper));
  }
  return out;
}

void ReferenceMeasure::project(std::span<double> point) const {
  if (kind_ == ReferenceKind::unit_cube) {
    for (double& x : point) x = std::clamp(x, 0.0, 1.0);
    return;
  }
  double norm2 = 0.0;
  for (double x : point) norm2 += x * x;
  if (norm2 > 1.0) {
    const double s = 1.0 / std::sqrt(norm2);
    for (double& x : point) x *= s;
    // Rounding can leave the norm a hair above one.
    norm2 = 0.0;
    for (double x : point) norm2 += x * x;
    if (norm2 > 1.0) {
      for (double& x : point) x = std::nextafter(x, 0.0);
    }
  }
}

double ReferenceMeasure::diameter() const {
  return kind_ == ReferenceKind::unit_cube ? std::sqrt(static_cast<double>(dim_)) : 2.0;
}

std::string_view ReferenceMeasure::name() const noexcept {
  switch (kind_) {
    case ReferenceKind::unit_cube:
      return "cube";
    case ReferenceKind::unit_ball:
      return "ball";
    case ReferenceKind::spherical_uniform:
      return "spherical";
  }
  return "cube";
}

ReferenceKind ReferenceMeasure::parse_kind(std::string_view name) {
  if (name == "cube" || name == "unit-cube") return ReferenceKind::unit_cube;
  if (name == "ball" || name == "unit-ball") return ReferenceKind::unit_ball;
  if (name == "spherical" || name == "spherical-uniform") return ReferenceKind::spherical_uniform;
  throw InputError("unknown reference measure '" + std::string(name) + "'");
}

}  // namespace otranks
