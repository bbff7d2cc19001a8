#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "otranks/types.hpp"

namespace otranks {

/// min c'x subject to A x = b, x >= 0, solved by a dense revised simplex.
/// Sized for few rows (d + 1) and many columns; columns may be appended between
/// solves and the previous basis reused as a warm start.
class StandardFormLp {
 public:
  explicit StandardFormLp(std::size_t rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t columns() const noexcept { return costs_.size(); }

  std::size_t add_column(std::span<const double> column, double cost);
  void set_rhs(std::span<const double> rhs);

  struct Solution {
    std::vector<std::size_t> basis;  // column index per row
    Vector basic_values;             // x_B
    Vector duals;                    // pi with B' pi = c_B
    double objective = 0.0;
    std::size_t pivots = 0;
  };

  /// Starts from `basis`, which must be primal feasible. Throws NumericalError on an
  /// unbounded problem, a singular basis or when the pivot budget runs out.
  Solution solve(std::vector<std::size_t> basis, std::size_t max_pivots = 10000) const;

  std::span<const double> column(std::size_t j) const { return {matrix_.data() + j * rows_, rows_}; }
  double cost(std::size_t j) const { return costs_[j]; }

 private:
  std::size_t rows_;
  std::vector<double> matrix_;  // column-major
  std::vector<double> costs_;
  Vector rhs_;
};

/// Solves M x = r in place for a small dense square system (partial pivoting).
/// Returns false when M is numerically singular.
bool solve_dense(std::vector<double> m, std::span<double> r, std::size_t size, bool transpose);

}  // namespace otranks
