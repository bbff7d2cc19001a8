#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace otranks {

/// A point in R^d.
using Vector = std::vector<double>;

/// Broad failure classes. The CLI maps these onto its exit codes.
enum class ErrorKind {
  input,      // malformed arguments, dimension mismatch, bad files
  numerical,  // non-convergence, certificate violations
  data,       // duplicate observations and other data defects
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorKind::input, what) {}
};

class DimensionMismatch : public InputError {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : InputError("dimension mismatch: expected " + std::to_string(expected) + ", got " +
                   std::to_string(got)) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

/// Row-major n x d matrix of observations.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::size_t dim) : dim_(dim) {}
  PointSet(std::size_t dim, std::vector<double> coords);

  static PointSet from_rows(const std::vector<Vector>& rows);

  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return coords_.empty(); }

  std::span<const double> operator[](std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  std::span<double> row(std::size_t i) { return {coords_.data() + i * dim_, dim_}; }

  void push_back(std::span<const double> point);
  void reserve(std::size_t n) { coords_.reserve(n * dim_); }

  const std::vector<double>& data() const noexcept { return coords_; }

  /// Columns [first, first + count) as a new point set.
  PointSet columns(std::size_t first, std::size_t count) const;

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

inline Vector to_vector(std::span<const double> p) { return Vector(p.begin(), p.end()); }

double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);

}  // namespace otranks
