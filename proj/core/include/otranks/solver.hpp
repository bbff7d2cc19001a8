#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "otranks/potential.hpp"
#include "otranks/reference_measure.hpp"
#include "otranks/types.hpp"

namespace otranks {

enum class Backend { automatic, exact1d, exact2d, montecarlo };

std::string_view backend_name(Backend backend) noexcept;
Backend parse_backend(std::string_view name);

struct SolverConfig {
  Backend backend = Backend::automatic;
  /// Sup-norm bound on |mu(W_i) - target_i|. Non-positive selects the backend default:
  /// 1e-7 for exact backends, 0.25 / n for montecarlo.
  double tolerance = 0.0;
  std::size_t max_iterations = 10000;
  /// Monte Carlo quadrature size M. Zero selects max(10^4, 100 n).
  std::size_t quadrature_size = 0;
  std::uint64_t seed = 0;
};

/// Fills in defaults and resolves `automatic`: exact1d for the unit interval,
/// exact2d for the unit square, montecarlo otherwise. Throws on incompatible choices.
SolverConfig resolve_config(const SolverConfig& config, std::size_t n, const ReferenceMeasure& reference);

/// Entry i estimates mu(W_i). Exact backends return lengths/areas; montecarlo
/// returns the fraction of `quadrature` assigned to each cell.
std::vector<double> cell_measures(const PiecewiseAffinePotential& potential, const ReferenceMeasure& reference,
                                  Backend backend, const PointSet* quadrature = nullptr);

/// F(h) = integral of psi_h dmu - sum_i target_i h_i. Convex in h with gradient
/// mu(W_i(h)) - target_i. Uniform targets 1/n when `targets` is empty.
double dual_objective(const PiecewiseAffinePotential& potential, const ReferenceMeasure& reference, Backend backend,
                      const PointSet* quadrature = nullptr, std::span<const double> targets = {});

/// A solved semi-discrete transport problem. Immutable; cell geometry is
/// computed once for exact backends and shared between copies.
class FittedTransport {
 public:
  FittedTransport(PiecewiseAffinePotential potential, ReferenceMeasure reference, SolverConfig config,
                  std::vector<double> targets, double residual, std::size_t iterations,
                  std::shared_ptr<const PointSet> quadrature);

  const PiecewiseAffinePotential& potential() const noexcept { return potential_; }
  const ReferenceMeasure& reference() const noexcept { return reference_; }
  const SolverConfig& config() const noexcept { return config_; }
  Backend backend() const noexcept { return config_.backend; }
  std::size_t size() const noexcept { return potential_.size(); }
  std::size_t dim() const noexcept { return potential_.dim(); }
  const std::vector<double>& targets() const noexcept { return targets_; }
  double residual() const noexcept { return residual_; }
  std::size_t iterations() const noexcept { return iterations_; }

  /// Monte Carlo quadrature (montecarlo backend only, else nullptr).
  const PointSet* quadrature() const noexcept { return quadrature_.get(); }

  bool has_cells() const noexcept { return cells_ != nullptr; }
  /// Cells indexed by site; throws unless the backend is exact1d or exact2d.
  const std::vector<PowerCell>& cells() const;

 private:
  PiecewiseAffinePotential potential_;
  ReferenceMeasure reference_;
  SolverConfig config_;
  std::vector<double> targets_;
  double residual_;
  std::size_t iterations_;
  std::shared_ptr<const PointSet> quadrature_;
  std::shared_ptr<const std::vector<PowerCell>> cells_;
};

/// Fits h so every cell carries mu-mass 1/n. Rejects duplicate points.
FittedTransport fit(const PointSet& points, const ReferenceMeasure& reference, const SolverConfig& config = {});

/// Fits h so cell i carries mass targets[i] (positive, summing to one).
/// A caller-supplied quadrature replaces the seeded draw for the montecarlo backend.
FittedTransport fit_weighted(const PointSet& points, std::span<const double> targets,
                             const ReferenceMeasure& reference, const SolverConfig& config = {},
                             std::shared_ptr<const PointSet> quadrature = nullptr);

/// Rebuilds a fitted model from stored weights (used when loading model files).
/// Empty targets mean uniform masses.
FittedTransport restore(const PointSet& points, std::vector<double> weights, const ReferenceMeasure& reference,
                        const SolverConfig& config, double residual, std::size_t iterations,
                        std::span<const double> targets = {});

/// Monte Carlo quadrature drawn from the reference with the solver seed.
std::shared_ptr<const PointSet> make_quadrature(const ReferenceMeasure& reference, std::size_t size,
                                                std::uint64_t seed);

/// Integral of |u - X_assign(u)|^2 dmu(u).
double transport_cost(const FittedTransport& fitted);

}  // namespace otranks
