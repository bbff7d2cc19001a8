#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "otranks/potential.hpp"
#include "otranks/reference_measure.hpp"
#include "otranks/rng.hpp"
#include "otranks/solver.hpp"
#include "otranks/types.hpp"

namespace otranks {

/// Empirical quantile map: the site whose cell contains u. u must lie in S.
Vector quantile(const FittedTransport& fitted, std::span<const double> u);

enum class RankMode {
  optimize,      // supergradient ascent, then an exact LP polish
  exact_vertex,  // enumerate cell vertices (d <= 2, cube only)
};

/// A maximizer u of g(u) = <u, y> - psi(u) over S together with its certificate.
/// `value` is g(u); `upper_bound` is a dual bound on max g, so the optimality
/// gap is upper_bound - value.
struct RankResult {
  Vector point;
  double value = 0.0;
  double upper_bound = 0.0;
  double gap() const { return upper_bound - value; }
};

/// Largest optimality gap accepted before a rank query is reported as failed.
inline constexpr double kRankCertificate = 1e-8;

RankResult rank_certified(const PiecewiseAffinePotential& potential, const ReferenceMeasure& reference,
                          std::span<const double> y);
RankResult rank_certified(const FittedTransport& fitted, std::span<const double> y,
                          RankMode mode = RankMode::optimize);

/// Empirical rank map R(y) in S. Throws NumericalError if the certificate fails.
Vector rank(const FittedTransport& fitted, std::span<const double> y, RankMode mode = RankMode::optimize);

/// Legendre conjugate psi*(y) = max_{u in S} <u, y> - psi(u).
double conjugate(const FittedTransport& fitted, std::span<const double> y);

/// Weak-duality bound sigma_S(y - sum lambda_i X_i) - sum lambda_i h_i for a
/// probability vector lambda over the sites.
double conjugate_upper_bound(const PiecewiseAffinePotential& potential, const ReferenceMeasure& reference,
                             std::span<const double> y, std::span<const double> lambda);

/// Uniform draw from cell i.
Vector rank_at_sample(const FittedTransport& fitted, std::size_t i, RandomStream& rng);

/// rank_at_sample with a stream keyed by (seed, coordinates of site i), so the draw
/// does not depend on the site's position in the input.
Vector randomized_rank(const FittedTransport& fitted, std::size_t i, std::uint64_t seed);

/// Vertex of cell i with the largest Euclidean norm (ties: lexicographically smallest).
Vector rank_at_sample_deterministic(const FittedTransport& fitted, std::size_t i);

/// 1/2 - |r - 1/2|_inf for a rank r in the unit cube.
double depth_from_rank(std::span<const double> r);
/// Depth of x; cube reference only.
double depth(const FittedTransport& fitted, std::span<const double> x);

struct RateSpec {
  double n = 1.0;
  std::size_t d = 1;
  double q = 6.0;
};

/// Psi(n, d, q). Rejects q <= 2, q = 4 when d <= 4 and q = d/(d-2) when d > 4.
double psi_rate(const RateSpec& spec);

/// sup over the closed disk B(center, radius) of |X_assign(u) - u|; exact2d only,
/// and the disk must lie inside the open unit square.
double local_sup_deviation(const FittedTransport& fitted, std::span<const double> center, double radius);

}  // namespace otranks
