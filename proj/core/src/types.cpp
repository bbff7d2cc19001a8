#include "otranks/types.hpp"

namespace otranks {

PointSet::PointSet(std::size_t dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
  if (dim_ == 0) throw InputError("point set dimension must be positive");
  if (coords_.size() % dim_ != 0) throw InputError("coordinate count is not a multiple of the dimension");
}

PointSet PointSet::from_rows(const std::vector<Vector>& rows) {
  if (rows.empty()) throw InputError("no rows");
  PointSet out(rows.front().size());
  if (out.dim_ == 0) throw InputError("point set dimension must be positive");
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r);
  return out;
}

void PointSet::push_back(std::span<const double> point) {
  if (point.size() != dim_) throw DimensionMismatch(dim_, point.size());
  coords_.insert(coords_.end(), point.begin(), point.end());
}

PointSet PointSet::columns(std::size_t first, std::size_t count) const {
  if (count == 0 || first + count > dim_) throw InputError("column range out of bounds");
  PointSet out(count);
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back((*this)[i].subspan(first, count));
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double t = a[k] - b[k];
    s += t * t;
  }
  return s;
}

}  // namespace otranks
