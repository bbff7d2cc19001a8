#include "otranks/solver.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "otranks/parallel.hpp"

namespace otranks {

std::string_view backend_name(Backend backend) noexcept {
  switch (backend) {
    case Backend::automatic:
      return "auto";
    case Backend::exact1d:
      return "exact1d";
    case Backend::exact2d:
      return "exact2d";
    case Backend::montecarlo:
      return "montecarlo";
  }
  return "auto";
}

Backend parse_backend(std::string_view name) {
  if (name == "auto") return Backend::automatic;
  if (name == "exact1d") return Backend::exact1d;
  if (name == "exact2d") return Backend::exact2d;
  if (name == "montecarlo" || name == "mc") return Backend::montecarlo;
  throw InputError("unknown backend '" + std::string(name) + "'");
}

namespace {

void check_backend(Backend backend, const ReferenceMeasure& reference) {
  if (backend == Backend::exact1d && !(reference.is_cube() && reference.dim() == 1)) {
    throw InputError("exact1d backend requires the unit-interval reference");
  }
  if (backend == Backend::exact2d && !(reference.is_cube() && reference.dim() == 2)) {
    throw InputError("exact2d backend requires the unit-square reference");
  }
}

}  // namespace

SolverConfig resolve_config(const SolverConfig& config, std::size_t n, const ReferenceMeasure& reference) {
  SolverConfig out = config;
  if (out.backend == Backend::automatic) {
    if (reference.is_cube() && reference.dim() == 1) {
      out.backend = Backend::exact1d;
    } else if (reference.is_cube() && reference.dim() == 2) {
      out.backend = Backend::exact2d;
    } else {
      out.backend = Backend::montecarlo;
    }
  }
  check_backend(out.backend, reference);
  if (!(out.tolerance > 0.0)) {
    out.tolerance = out.backend == Backend::montecarlo ? 0.25 / static_cast<double>(std::max<std::size_t>(n, 1)) : 1e-7;
  }
  if (out.max_iterations == 0) throw InputError("max_iterations must be positive");
  if (out.backend == Backend::montecarlo) {
    if (out.quadrature_size == 0) out.quadrature_size = std::max<std::size_t>(10000, 100 * n);
    if (out.quadrature_size < n) throw InputError("quadrature size must be at least the number of points");
  }
  return out;
}

std::shared_ptr<const PointSet> make_quadrature(const ReferenceMeasure& reference, std::size_t size,
                                                std::uint64_t seed) {
  RandomStream rng(derive_seed(seed, 0x717561647261ULL));
  return std::make_shared<const PointSet>(reference.sample(size, rng));
}

namespace {

struct DualState {
  double objective = 0.0;
  std::vector<double> measures;
  std::shared_ptr<const std::vector<PowerCell>> cells;
};

constexpr std::size_t kChunk = 2048;

DualState evaluate_dual(const PiecewiseAffinePotential& potential, const ReferenceMeasure& reference, Backend backend,
                        const PointSet* quadrature, std::span<const double> targets) {
  const std::size_t n = potential.size();
  const auto& h = potential.weights();
  DualState st;
  st.measures.assign(n, 0.0);
  double integral = 0.0;

  if (backend == Backend::exact1d || backend == Backend::exact2d) {
    auto cells = std::make_shared<std::vector<PowerCell>>(
        backend == Backend::exact1d ? cells_1d(potential, reference) : cells_2d(potential, reference));
    for (std::size_t i = 0; i < n; ++i) {
      const PowerCell& c = (*cells)[i];
      st.measures[i] = c.measure;
      if (c.measure > 0.0) {
        const auto x = potential.site(i);
        const double lin = backend == Backend::exact1d ? c.centroid.x * x[0]
                                                       : c.centroid.x * x[0] + c.centroid.y * x[1];
        integral += c.measure * (lin + h[i]);
      }
    }
    st.cells = std::move(cells);
  } else if (backend == Backend::montecarlo) {
    if (quadrature == nullptr) throw InputError("montecarlo backend needs a quadrature");
    if (quadrature->dim() != potential.dim()) throw DimensionMismatch(potential.dim(), quadrature->dim());
    const std::size_t m = quadrature->size();
    const std::size_t chunks = (m + kChunk - 1) / kChunk;
    std::vector<std::vector<std::size_t>> counts(chunks, std::vector<std::size_t>(n, 0));
    std::vector<double> sums(chunks, 0.0);
    parallel_for(chunks, [&](std::size_t c) {
      const std::size_t lo = c * kChunk, hi = std::min(m, lo + kChunk);
      double s = 0.0;
      for (std::size_t k = lo; k < hi; ++k) {
        const auto u = (*quadrature)[k];
        const std::size_t i = potential.assign(u);
        ++counts[c][i];
        s += dot(u, potential.site(i)) + h[i];
      }
      sums[c] = s;
    });
    std::vector<std::size_t> total(n, 0);
    for (std::size_t c = 0; c < chunks; ++c) {
      for (std::size_t i = 0; i < n; ++i) total[i] += counts[c][i];
      integral += sums[c];
    }
    integral /= static_cast<double>(m);
    for (std::size_t i = 0; i < n; ++i) st.measures[i] = static_cast<double>(total[i]) / static_cast<double>(m);
  } else {
    throw InputError("backend must be resolved before evaluation");
  }

  double linear = 0.0;
  if (targets.empty()) {
    linear = std::accumulate(h.begin(), h.end(), 0.0) / static_cast<double>(n);
  } else {
    for (std::size_t i = 0; i < n; ++i) linear += targets[i] * h[i];
  }
  st.objective = integral - linear;
  return st;
}

double residual_of(const std::vector<double>& measures, std::span<const double> targets) {
  double r = 0.0;
  for (std::size_t i = 0; i < measures.size(); ++i) r = std::max(r, std::abs(measures[i] - targets[i]));
  return r;
}

std::vector<double> uniform_targets(std::size_t n) { return std::vector<double>(n, 1.0 / static_cast<double>(n)); }

/// Closed-form weights on [0,1]: with sites sorted, consecutive lines cross at the
/// cumulative target masses, so h_(k+1) - h_(k) = c_k (x_(k) - x_(k+1)).
std::vector<double> closed_form_1d(const PointSet& points, std::span<const double> targets) {
  const std::size_t n = points.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return points[a][0] < points[b][0]; });
  std::vector<double> h(n, 0.0);
  double cumulative = 0.0;
  double current = 0.0;
  h[order[0]] = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    cumulative += targets[order[k]];
    current += cumulative * (points[order[k]][0] - points[order[k + 1]][0]);
    h[order[k + 1]] = current;
  }
  return h;
}

// Weights whose power diagram is the Voronoi diagram of the sites seen through an
// affine map of the square onto a box around them, so every cell starts with area.
std::vector<double> voronoi_start(const PointSet& points) {
  const std::size_t n = points.size(), d = points.dim();
  Vector lo = to_vector(points[0]), hi = lo;
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      lo[j] = std::min(lo[j], points[i][j]);
      hi[j] = std::max(hi[j], points[i][j]);
    }
  }
  double side = 0.0;
  for (std::size_t j = 0; j < d; ++j) side = std::max(side, hi[j] - lo[j]);
  side *= 1.25;
  std::vector<double> h(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double x = points[i][j];
      h[i] += x * (lo[j] + hi[j] - side - x);
    }
    h[i] /= 2.0 * side;
  }
  return h;
}

std::vector<double> areas_of(const std::vector<PowerCell>& cells) {
  std::vector<double> a(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) a[i] = cells[i].measure;
  return a;
}

double norm_of_difference(const std::vector<double>& a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Damped Newton on the dual for exact2d. The Hessian is the cell-adjacency
// Laplacian with weights |facet| / |X_i - X_j|; steps are halved until every cell
// keeps at least half of min(initial area, smallest target) and the gradient norm
// drops by the factor 1 - step / 2.
FittedTransport fit_newton_2d(PiecewiseAffinePotential potential, const ReferenceMeasure& reference,
                              const SolverConfig& config, std::vector<double> targets) {
  const std::size_t n = potential.size();
  potential = potential.with_weights(voronoi_start(potential.sites()));
  auto cells = cells_2d(potential, reference);
  auto measures = areas_of(cells);
  const double floor = 0.5 * std::min(*std::min_element(measures.begin(), measures.end()),
                                      *std::min_element(targets.begin(), targets.end()));
  if (!(floor > 0.0)) throw NumericalError("starting power diagram has an empty cell");

  std::vector<Eigen::Triplet<double>> entries;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  for (std::size_t iteration = 0;; ++iteration) {
    const double residual = residual_of(measures, targets);
    if (residual <= config.tolerance) {
      return FittedTransport(std::move(potential), reference, config, std::move(targets), residual, iteration, nullptr);
    }
    if (iteration >= config.max_iterations) {
      throw NumericalError("solver did not converge within " + std::to_string(config.max_iterations) +
                           " iterations (residual " + std::to_string(residual) + ")");
    }

    // Site 0 is grounded (its step is zero); the gauge is restored afterwards.
    entries.clear();
    std::vector<double> diagonal(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& c = cells[i];
      const auto xi = potential.site(i);
      for (std::size_t k = 0; k < c.polygon.size(); ++k) {
        if (c.neighbors[k] < 0) continue;
        const auto j = static_cast<std::size_t>(c.neighbors[k]);
        const Point2 p = c.polygon[k], q = c.polygon[(k + 1) % c.polygon.size()];
        const double w = 0.5 * std::hypot(q.x - p.x, q.y - p.y) / std::sqrt(squared_distance(xi, potential.site(j)));
        diagonal[i] += w;
        diagonal[j] += w;
        if (i > 0 && j > 0) {
          entries.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1), -w);
          entries.emplace_back(static_cast<int>(j - 1), static_cast<int>(i - 1), -w);
        }
      }
    }
    for (std::size_t i = 1; i < n; ++i) entries.emplace_back(static_cast<int>(i - 1), static_cast<int>(i - 1), diagonal[i]);
    Eigen::SparseMatrix<double> hessian(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(n - 1));
    hessian.setFromTriplets(entries.begin(), entries.end());
    ldlt.compute(hessian);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(n - 1));
    for (std::size_t i = 1; i < n; ++i) rhs[static_cast<Eigen::Index>(i - 1)] = targets[i] - measures[i];
    const Eigen::VectorXd step_dir = ldlt.solve(rhs);
    if (ldlt.info() != Eigen::Success || !step_dir.allFinite()) {
      throw NumericalError("singular Newton system (residual " + std::to_string(residual) + ")");
    }

    const double gnorm = norm_of_difference(measures, targets);
    bool accepted = false;
    double step = 1.0;
    for (int k = 0; k < 50 && !accepted; ++k, step *= 0.5) {
      std::vector<double> trial = potential.weights();
      for (std::size_t i = 1; i < n; ++i) trial[i] += step * step_dir[static_cast<Eigen::Index>(i - 1)];
      PiecewiseAffinePotential candidate = potential.with_weights(std::move(trial));
      auto ccells = cells_2d(candidate, reference);
      auto cmeasures = areas_of(ccells);
      if (*std::min_element(cmeasures.begin(), cmeasures.end()) >= floor &&
          norm_of_difference(cmeasures, targets) <= (1.0 - 0.5 * step) * gnorm) {
        potential = std::move(candidate);
        cells = std::move(ccells);
        measures = std::move(cmeasures);
        accepted = true;
      }
    }
    if (!accepted) throw NumericalError("Newton line search failed (residual " + std::to_string(residual) + ")");
  }
}

void validate_targets(std::span<const double> targets, std::size_t n) {
  if (targets.size() != n) throw InputError("target mass count does not match point count");
  double total = 0.0;
  for (double t : targets) {
    if (!(t > 0.0)) throw InputError("target masses must be positive");
    total += t;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InputError("target masses must sum to one");
}

}  // namespace

std::vector<double> cell_measures(const PiecewiseAffinePotential& potential, const ReferenceMeasure& reference,
                                  Backend backend, const PointSet* quadrature) {
  check_backend(backend, reference);
  if (potential.dim() != reference.dim()) throw DimensionMismatch(reference.dim(), potential.dim());
  return evaluate_dual(potential, reference, backend, quadrature, {}).measures;
}

double dual_objective(const PiecewiseAffinePotential& potential, const ReferenceMeasure& reference, Backend backend,
                      const PointSet* quadrature, std::span<const double> targets) {
  check_backend(backend, reference);
  if (potential.dim() != reference.dim()) throw DimensionMismatch(reference.dim(), potential.dim());
  if (!targets.empty()) validate_targets(targets, potential.size());
  return evaluate_dual(potential, reference, backend, quadrature, targets).objective;
}

FittedTransport::FittedTransport(PiecewiseAffinePotential potential, ReferenceMeasure reference, SolverConfig config,
                                 std::vector<double> targets, double residual, std::size_t iterations,
                                 std::shared_ptr<const PointSet> quadrature)
    : potential_(std::move(potential)),
      reference_(reference),
      config_(config),
      targets_(std::move(targets)),
      residual_(residual),
      iterations_(iterations),
      quadrature_(std::move(quadrature)) {
  if (config_.backend == Backend::exact1d) {
    cells_ = std::make_shared<const std::vector<PowerCell>>(cells_1d(potential_, reference_));
  } else if (config_.backend == Backend::exact2d) {
    cells_ = std::make_shared<const std::vector<PowerCell>>(cells_2d(potential_, reference_));
  }
}

const std::vector<PowerCell>& FittedTransport::cells() const {
  if (!cells_) throw InputError("exact cell geometry requires the exact1d or exact2d backend");
  return *cells_;
}

FittedTransport fit(const PointSet& points, const ReferenceMeasure& reference, const SolverConfig& config) {
  const auto targets = uniform_targets(points.size());
  return fit_weighted(points, targets, reference, config);
}

FittedTransport fit_weighted(const PointSet& points, std::span<const double> targets_in,
                             const ReferenceMeasure& reference, const SolverConfig& config_in,
                             std::shared_ptr<const PointSet> quadrature) {
  if (points.size() == 0) throw InputError("fit needs at least one point");
  if (points.dim() != reference.dim()) throw DimensionMismatch(reference.dim(), points.dim());
  const std::size_t n = points.size();
  validate_targets(targets_in, n);
  std::vector<double> targets(targets_in.begin(), targets_in.end());
  const SolverConfig config = resolve_config(config_in, n, reference);

  if (config.backend == Backend::montecarlo) {
    if (quadrature) {
      if (quadrature->dim() != reference.dim()) throw DimensionMismatch(reference.dim(), quadrature->dim());
      if (quadrature->size() < n) throw InputError("quadrature size must be at least the number of points");
    } else {
      quadrature = make_quadrature(reference, config.quadrature_size, config.seed);
    }
  } else {
    quadrature.reset();
  }

  PiecewiseAffinePotential potential(points, std::vector<double>(n, 0.0));
  if (n == 1) {
    return FittedTransport(std::move(potential), reference, config, std::move(targets), 0.0, 0, quadrature);
  }

  if (config.backend == Backend::exact1d) {
    potential = potential.with_weights(closed_form_1d(points, targets));
    const auto st = evaluate_dual(potential, reference, config.backend, nullptr, targets);
    const double residual = residual_of(st.measures, targets);
    if (residual > config.tolerance) {
      throw NumericalError("exact1d closed form missed the tolerance (residual " + std::to_string(residual) + ")");
    }
    return FittedTransport(std::move(potential), reference, config, std::move(targets), residual, 0, quadrature);
  }

  if (config.backend == Backend::exact2d) return fit_newton_2d(std::move(potential), reference, config, std::move(targets));

  // Limited-memory quasi-Newton descent (two-loop recursion over the last few
  // gradient differences) with Armijo backtracking from a unit step. Falls back to
  // the steepest-descent direction whenever the curvature pairs stop producing one.
  constexpr double kArmijo = 1e-4;
  constexpr double kShrink = 0.5;
  constexpr int kMaxHalvings = 60;
  constexpr std::size_t kMemory = 10;

  DualState st = evaluate_dual(potential, reference, config.backend, quadrature.get(), targets);
  std::vector<double> grad(n), direction(n);
  std::vector<std::vector<double>> s_hist, y_hist;
  std::vector<double> rho_hist;
  std::size_t iteration = 0;
  for (;; ++iteration) {
    for (std::size_t i = 0; i < n; ++i) grad[i] = st.measures[i] - targets[i];
    const double residual = residual_of(st.measures, targets);
    if (residual <= config.tolerance) {
      return FittedTransport(std::move(potential), reference, config, std::move(targets), residual, iteration,
                             quadrature);
    }
    if (iteration >= config.max_iterations) {
      throw NumericalError("solver did not converge within " + std::to_string(config.max_iterations) +
                           " iterations (residual " + std::to_string(residual) + ")");
    }

    // direction = -H grad
    direction = grad;
    const std::size_t m = s_hist.size();
    std::vector<double> alpha(m);
    for (std::size_t k = m; k-- > 0;) {
      alpha[k] = rho_hist[k] * std::inner_product(s_hist[k].begin(), s_hist[k].end(), direction.begin(), 0.0);
      for (std::size_t i = 0; i < n; ++i) direction[i] -= alpha[k] * y_hist[k][i];
    }
    if (m > 0) {
      const double yy = std::inner_product(y_hist.back().begin(), y_hist.back().end(), y_hist.back().begin(), 0.0);
      const double gamma = 1.0 / (rho_hist.back() * yy);
      for (double& v : direction) v *= gamma;
    }
    for (std::size_t k = 0; k < m; ++k) {
      const double beta = rho_hist[k] * std::inner_product(y_hist[k].begin(), y_hist[k].end(), direction.begin(), 0.0);
      for (std::size_t i = 0; i < n; ++i) direction[i] += (alpha[k] - beta) * s_hist[k][i];
    }
    for (double& v : direction) v = -v;
    double slope = std::inner_product(grad.begin(), grad.end(), direction.begin(), 0.0);
    if (!(slope < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      for (std::size_t i = 0; i < n; ++i) direction[i] = -grad[i];
      slope = -std::inner_product(grad.begin(), grad.end(), grad.begin(), 0.0);
    }

    const double grad_sq = std::inner_product(grad.begin(), grad.end(), grad.begin(), 0.0);
    double step = 1.0;
    bool accepted = false;
    for (int k = 0; k < kMaxHalvings; ++k, step *= kShrink) {
      std::vector<double> trial = potential.weights();
      for (std::size_t i = 0; i < n; ++i) trial[i] += step * direction[i];
      PiecewiseAffinePotential candidate = potential.with_weights(std::move(trial));
      DualState cst = evaluate_dual(candidate, reference, config.backend, quadrature.get(), targets);
      // Near the optimum F stops resolving the required decrease; a step that leaves F
      // unchanged to rounding but shrinks the gradient is accepted instead.
      const double noise = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(st.objective));
      double new_grad_sq = 0.0;
      for (std::size_t i = 0; i < n; ++i) new_grad_sq += (cst.measures[i] - targets[i]) * (cst.measures[i] - targets[i]);
      const bool armijo = cst.objective <= st.objective + kArmijo * step * slope;
      const bool flat = cst.objective <= st.objective + noise && new_grad_sq < grad_sq;
      if (armijo || flat) {
        std::vector<double> s(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
          s[i] = candidate.weights()[i] - potential.weights()[i];
          y[i] = (cst.measures[i] - targets[i]) - grad[i];
        }
        const double sy = std::inner_product(s.begin(), s.end(), y.begin(), 0.0);
        if (sy > 1e-12 * std::sqrt(std::inner_product(s.begin(), s.end(), s.begin(), 0.0) *
                                   std::inner_product(y.begin(), y.end(), y.begin(), 0.0))) {
          s_hist.push_back(std::move(s));
          y_hist.push_back(std::move(y));
          rho_hist.push_back(1.0 / sy);
          if (s_hist.size() > kMemory) {
            s_hist.erase(s_hist.begin());
            y_hist.erase(y_hist.begin());
            rho_hist.erase(rho_hist.begin());
          }
        }
        potential = std::move(candidate);
        st = std::move(cst);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (s_hist.empty()) throw NumericalError("line search failed (residual " + std::to_string(residual) + ")");
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }
  }
}

FittedTransport restore(const PointSet& points, std::vector<double> weights, const ReferenceMeasure& reference,
                        const SolverConfig& config_in, double residual, std::size_t iterations,
                        std::span<const double> targets_in) {
  if (points.dim() != reference.dim()) throw DimensionMismatch(reference.dim(), points.dim());
  const SolverConfig config = resolve_config(config_in, points.size(), reference);
  std::shared_ptr<const PointSet> quadrature;
  if (config.backend == Backend::montecarlo) quadrature = make_quadrature(reference, config.quadrature_size, config.seed);
  if (weights.size() != points.size()) throw InputError("weight count does not match point count");
  std::vector<double> targets = targets_in.empty() ? uniform_targets(points.size())
                                                   : std::vector<double>(targets_in.begin(), targets_in.end());
  validate_targets(targets, points.size());
  auto potential = PiecewiseAffinePotential::from_gauged(points, std::move(weights));
  return FittedTransport(std::move(potential), reference, config, std::move(targets), residual, iterations,
                         std::move(quadrature));
}

double transport_cost(const FittedTransport& fitted) {
  const auto& potential = fitted.potential();
  switch (fitted.backend()) {
    case Backend::exact1d: {
      double total = 0.0;
      for (const auto& c : fitted.cells()) {
        const double x = potential.site(c.site)[0];
        const double a = c.lower - x, b = c.upper - x;
        total += (b * b * b - a * a * a) / 3.0;
      }
      return total;
    }
    case Backend::exact2d: {
      double total = 0.0;
      for (const auto& c : fitted.cells()) {
        if (c.polygon.empty()) continue;
        const auto x = potential.site(c.site);
        total += integrate_squared_distance(c.polygon, {x[0], x[1]});
      }
      return total;
    }
    case Backend::montecarlo: {
      const PointSet& q = *fitted.quadrature();
      const std::size_t chunks = (q.size() + kChunk - 1) / kChunk;
      std::vector<double> sums(chunks, 0.0);
      parallel_for(chunks, [&](std::size_t c) {
        const std::size_t lo = c * kChunk, hi = std::min(q.size(), lo + kChunk);
        double s = 0.0;
        for (std::size_t k = lo; k < hi; ++k) s += squared_distance(q[k], potential.site(potential.assign(q[k])));
        sums[c] = s;
      });
      return std::accumulate(sums.begin(), sums.end(), 0.0) / static_cast<double>(q.size());
    }
    case Backend::automatic:
      break;
  }
  throw InputError("unresolved backend");
}

}  // namespace otranks
