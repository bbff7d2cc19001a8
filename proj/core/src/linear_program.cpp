#include "otranks/linear_program.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace otranks {

bool solve_dense(std::vector<double> m, std::span<double> r, std::size_t size, bool transpose) {
  // m is column-major; the transposed system just reads it row-major.
  auto at = [&](std::size_t i, std::size_t j) -> double& { return transpose ? m[i * size + j] : m[j * size + i]; };
  for (std::size_t k = 0; k < size; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < size; ++i) {
      if (std::abs(at(i, k)) > std::abs(at(piv, k))) piv = i;
    }
    if (std::abs(at(piv, k)) < 1e-300) return false;
    if (piv != k) {
      for (std::size_t j = 0; j < size; ++j) std::swap(at(k, j), at(piv, j));
      std::swap(r[k], r[piv]);
    }
    for (std::size_t i = k + 1; i < size; ++i) {
      const double f = at(i, k) / at(k, k);
      if (f == 0.0) continue;
      for (std::size_t j = k; j < size; ++j) at(i, j) -= f * at(k, j);
      r[i] -= f * r[k];
    }
  }
  for (std::size_t k = size; k-- > 0;) {
    double s = r[k];
    for (std::size_t j = k + 1; j < size; ++j) s -= at(k, j) * r[j];
    r[k] = s / at(k, k);
  }
  return true;
}

StandardFormLp::StandardFormLp(std::size_t rows) : rows_(rows), rhs_(rows, 0.0) {
  if (rows == 0) throw InputError("linear program needs at least one row");
}

std::size_t StandardFormLp::add_column(std::span<const double> column, double cost) {
  if (column.size() != rows_) throw DimensionMismatch(rows_, column.size());
  matrix_.insert(matrix_.end(), column.begin(), column.end());
  costs_.push_back(cost);
  return costs_.size() - 1;
}

void StandardFormLp::set_rhs(std::span<const double> rhs) {
  if (rhs.size() != rows_) throw DimensionMismatch(rows_, rhs.size());
  rhs_.assign(rhs.begin(), rhs.end());
}

StandardFormLp::Solution StandardFormLp::solve(std::vector<std::size_t> basis, std::size_t max_pivots) const {
  const std::size_t m = rows_;
  if (basis.size() != m) throw InputError("basis size must equal the row count");
  std::vector<double> bmat(m * m);
  Vector x(m), pi(m), w(m);
  std::vector<char> in_basis(columns(), 0);
  for (std::size_t j : basis) in_basis.at(j) = 1;

  // Dantzig pricing until progress stalls, then Bland's rule, which cannot cycle.
  std::size_t stalled = 0;
  double last_objective = std::numeric_limits<double>::infinity();
  for (std::size_t pivot = 0;; ++pivot) {
    for (std::size_t r = 0; r < m; ++r) {
      const auto col = column(basis[r]);
      std::copy(col.begin(), col.end(), bmat.begin() + static_cast<std::ptrdiff_t>(r * m));
    }
    std::copy(rhs_.begin(), rhs_.end(), x.begin());
    if (!solve_dense(bmat, x, m, false)) throw NumericalError("singular simplex basis");
    for (std::size_t r = 0; r < m; ++r) pi[r] = costs_[basis[r]];
    if (!solve_dense(bmat, pi, m, true)) throw NumericalError("singular simplex basis");

    double objective = 0.0;
    for (std::size_t r = 0; r < m; ++r) objective += costs_[basis[r]] * x[r];
    if (objective < last_objective - 1e-13 * (1.0 + std::abs(objective))) {
      stalled = 0;
    } else {
      ++stalled;
    }
    last_objective = std::min(last_objective, objective);
    const bool bland = stalled > 2 * m;

    std::size_t entering = columns();
    double best = 0.0;
    for (std::size_t j = 0; j < columns(); ++j) {
      if (in_basis[j]) continue;
      const auto col = column(j);
      double reduced = costs_[j];
      double scale = std::abs(costs_[j]);
      for (std::size_t r = 0; r < m; ++r) {
        reduced -= pi[r] * col[r];
        scale = std::max(scale, std::abs(pi[r] * col[r]));
      }
      if (reduced < -1e-12 * (1.0 + scale) && reduced < best) {
        entering = j;
        best = reduced;
        if (bland) break;
      }
    }
    if (entering == columns()) {
      return Solution{std::move(basis), std::move(x), std::move(pi), objective, pivot};
    }
    if (pivot >= max_pivots) throw NumericalError("simplex pivot budget exhausted");

    const auto col = column(entering);
    std::copy(col.begin(), col.end(), w.begin());
    if (!solve_dense(bmat, w, m, false)) throw NumericalError("singular simplex basis");
    std::size_t leaving = m;
    double ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < m; ++r) {
      if (w[r] <= 1e-12) continue;
      const double t = std::max(x[r], 0.0) / w[r];
      if (t < ratio || (t == ratio && leaving < m && basis[r] < basis[leaving])) {
        ratio = t;
        leaving = r;
      }
    }
    if (leaving == m) throw NumericalError("linear program is unbounded");
    in_basis[basis[leaving]] = 0;
    in_basis[entering] = 1;
    basis[leaving] = entering;
  }
}

}  // namespace otranks
