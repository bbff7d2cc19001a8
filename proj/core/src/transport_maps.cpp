#include "otranks/transport_maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "otranks/linear_program.hpp"

namespace otranks {

Vector quantile(const FittedTransport& fitted, std::span<const double> u) {
  if (u.size() != fitted.dim()) throw DimensionMismatch(fitted.dim(), u.size());
  if (!fitted.reference().contains(u)) throw InputError("quantile argument lies outside the reference support");
  return to_vector(fitted.potential().site(fitted.potential().assign(u)));
}

namespace {

double g_value(const PiecewiseAffinePotential& potential, std::span<const double> u, std::span<const double> y) {
  return dot(u, y) - potential.value(u);
}

double support_function(const ReferenceMeasure& reference, std::span<const double> v) {
  double s = 0.0;
  if (reference.is_cube()) {
    for (double x : v) s += std::max(x, 0.0);
  } else {
    for (double x : v) s += x * x;
    s = std::sqrt(s);
  }
  return s;
}

void check_query(const PiecewiseAffinePotential& potential, std::span<const double> y) {
  if (y.size() != potential.dim()) throw DimensionMismatch(potential.dim(), y.size());
  for (double v : y) {
    if (!std::isfinite(v)) throw InputError("rank query must be finite");
  }
}

// When one plane i is active at the optimum of a ball problem, u = (y - X_i)/|y - X_i|
// and lambda = e_i close the gap in closed form; the LP alone stalls near 1e-13
// relative accuracy, which is not enough for large |y|.
void polish_single_plane(const PiecewiseAffinePotential& potential, const ReferenceMeasure& reference,
                         std::span<const double> y, RankResult& best) {
  const std::size_t n = potential.size(), d = potential.dim();
  std::size_t arg = 0;
  double low = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double v = dot(best.point, y) - dot(best.point, potential.site(i)) - potential.weights()[i];
    if (v < low) {
      low = v;
      arg = i;
    }
  }
  Vector u(d);
  for (std::size_t j = 0; j < d; ++j) u[j] = y[j] - potential.site(arg)[j];
  const double norm = std::sqrt(dot(u, u));
  if (!(norm > 0.0)) return;
  for (double& v : u) v /= norm;
  reference.project(u);
  const double value = g_value(potential, u, y);
  if (value > best.value) {
    best.value = value;
    best.point = std::move(u);
  }
  std::vector<double> lambda(n, 0.0);
  lambda[arg] = 1.0;
  best.upper_bound = std::min(best.upper_bound, conjugate_upper_bound(potential, reference, y, lambda));
}

// Dual of max_{u in S} min_i <u, y - X_i> - h_i: rows (1; y), site columns (1; X_i)
// with cost -h_i, facet columns (0; a_k) with cost b_k. The simplex multipliers are
// (t, u) and the optimal u is a vertex of the primal. Non-polyhedral supports start
// from the bounding box and add tangent cuts until the vertex falls inside S.
RankResult rank_lp(const PiecewiseAffinePotential& potential, const ReferenceMeasure& reference,
                   std::span<const double> y) {
  const std::size_t n = potential.size(), d = potential.dim();
  StandardFormLp lp(d + 1);
  Vector col(d + 1), rhs(d + 1);
  rhs[0] = 1.0;
  std::copy(y.begin(), y.end(), rhs.begin() + 1);
  lp.set_rhs(rhs);
  std::size_t start = 0;
  double start_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    col[0] = 1.0;
    const auto x = potential.site(i);
    std::copy(x.begin(), x.end(), col.begin() + 1);
    lp.add_column(col, -potential.weights()[i]);
    const double dist = squared_distance(x, y);
    if (dist < start_dist) {
      start_dist = dist;
      start = i;
    }
  }
  const bool cube = reference.is_cube();
  std::vector<std::size_t> plus(d), minus(d);
  for (std::size_t j = 0; j < d; ++j) {
    std::fill(col.begin(), col.end(), 0.0);
    col[j + 1] = 1.0;
    plus[j] = lp.add_column(col, 1.0);
    col[j + 1] = -1.0;
    minus[j] = lp.add_column(col, cube ? 0.0 : 1.0);
  }
  std::vector<std::size_t> basis{start};
  for (std::size_t j = 0; j < d; ++j) basis.push_back(y[j] >= potential.site(start)[j] ? plus[j] : minus[j]);

  Vector u(d), lambda(n);
  constexpr std::size_t kMaxCuts = 5000;
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  RankResult best;
  best.value = -std::numeric_limits<double>::infinity();
  Vector last_duals;
  for (std::size_t cut = 0;; ++cut) {
    auto sol = lp.solve(basis);
    basis = sol.basis;
    std::copy(sol.duals.begin() + 1, sol.duals.end(), u.begin());
    std::fill(lambda.begin(), lambda.end(), 0.0);
    double mass = 0.0;
    for (std::size_t r = 0; r <= d; ++r) {
      if (sol.basis[r] < n) {
        lambda[sol.basis[r]] = std::max(sol.basic_values[r], 0.0);
        mass += lambda[sol.basis[r]];
      }
    }
    for (double& l : lambda) l /= mass;
    reference.project(u);
    const double value = g_value(potential, u, y);
    const double bound = conjugate_upper_bound(potential, reference, y, lambda);
    if (value > best.value) {
      best.point = u;
      best.value = value;
    }
    best.upper_bound = bound;
    if (cube) return best;

    double norm = 0.0;
    for (std::size_t j = 0; j < d; ++j) norm += sol.duals[j + 1] * sol.duals[j + 1];
    norm = std::sqrt(norm);
    if (norm <= 1.0 || best.upper_bound - best.value <= 1e-10 + 4.0 * kEps * std::abs(best.value) ||
        cut >= kMaxCuts || sol.duals == last_duals) {
      polish_single_plane(potential, reference, y, best);
      return best;
    }
    last_duals = sol.duals;
    col[0] = 0.0;
    for (std::size_t j = 0; j < d; ++j) col[j + 1] = sol.duals[j + 1] / norm;
    lp.add_column(col, 1.0);
  }
}

// Projected supergradient ascent with step diam(S)/sqrt(k) and iterate averaging,
// started from the projected site average.
Vector rank_supergradient(const PiecewiseAffinePotential& potential, const ReferenceMeasure& reference,
                          std::span<const double> y) {
  const std::size_t n = potential.size(), d = potential.dim();
  constexpr std::size_t kIterations = 2000;
  Vector u(d, 0.0), avg(d, 0.0), s(d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = potential.site(i);
    for (std::size_t j = 0; j < d; ++j) u[j] += x[j] / static_cast<double>(n);
  }
  reference.project(u);
  const double c = reference.diameter();
  const auto& h = potential.weights();
  std::size_t count = 0;
  for (std::size_t k = 1; k <= kIterations; ++k) {
    std::size_t arg = 0;
    double low = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = potential.site(i);
      double v = -h[i];
      for (std::size_t j = 0; j < d; ++j) v += u[j] * (y[j] - x[j]);
      if (v < low) {
        low = v;
        arg = i;
      }
    }
    for (std::size_t j = 0; j < d; ++j) avg[j] += u[j];
    ++count;
    double norm = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      s[j] = y[j] - potential.site(arg)[j];
      norm += s[j] * s[j];
    }
    if (norm == 0.0) break;
    const double step = c / std::sqrt(static_cast<double>(k)) / std::sqrt(norm);
    for (std::size_t j = 0; j < d; ++j) u[j] += step * s[j];
    reference.project(u);
  }
  for (double& v : avg) v /= static_cast<double>(count);
  reference.project(avg);
  return avg;
}

// Uniform targets give count / n exactly; weighted targets are summed in site order.
double empirical_cdf(const FittedTransport& fitted, double y) {
  const auto& potential = fitted.potential();
  const auto& t = fitted.targets();
  const std::size_t n = potential.size();
  const bool uniform = std::all_of(t.begin(), t.end(), [&](double v) { return v == t.front(); });
  std::size_t count = 0;
  std::vector<std::pair<double, double>> below;
  for (std::size_t i = 0; i < n; ++i) {
    if (potential.site(i)[0] <= y) {
      ++count;
      if (!uniform) below.emplace_back(potential.site(i)[0], t[i]);
    }
  }
  if (uniform) return static_cast<double>(count) / static_cast<double>(n);
  if (count == n) return 1.0;
  std::sort(below.begin(), below.end());
  double mass = 0.0;
  for (const auto& b : below) mass += b.second;
  return std::min(mass, 1.0);
}

RankResult rank_vertices(const FittedTransport& fitted, std::span<const double> y) {
  if (fitted.dim() > 2 || !fitted.has_cells()) {
    throw InputError("exact_vertex rank mode needs an exact1d or exact2d model");
  }
  const auto& potential = fitted.potential();
  std::vector<Vector> candidates;
  for (const auto& cell : fitted.cells()) {
    if (fitted.dim() == 1) {
      candidates.push_back({cell.lower});
      candidates.push_back({cell.upper});
    } else {
      for (const auto& v : cell.polygon) candidates.push_back({v.x, v.y});
    }
  }
  std::vector<double> values(candidates.size());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    values[k] = g_value(potential, candidates[k], y);
    best = std::max(best, values[k]);
  }
  const double slack = 1e-12 * (1.0 + std::abs(best));
  const Vector* pick = nullptr;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (values[k] >= best - slack && (pick == nullptr || candidates[k] < *pick)) pick = &candidates[k];
  }
  RankResult out = rank_lp(potential, fitted.reference(), y);
  out.point = *pick;
  out.value = g_value(potential, out.point, y);
  return out;
}

}  // namespace

double conjugate_upper_bound(const PiecewiseAffinePotential& potential, const ReferenceMeasure& reference,
                             std::span<const double> y, std::span<const double> lambda) {
  const std::size_t d = potential.dim();
  Vector v(y.begin(), y.end());
  double weight = 0.0;
  for (std::size_t i = 0; i < potential.size(); ++i) {
    if (lambda[i] == 0.0) continue;
    const auto x = potential.site(i);
    for (std::size_t j = 0; j < d; ++j) v[j] -= lambda[i] * x[j];
    weight += lambda[i] * potential.weights()[i];
  }
  return support_function(reference, v) - weight;
}

RankResult rank_certified(const PiecewiseAffinePotential& potential, const ReferenceMeasure& reference,
                          std::span<const double> y) {
  check_query(potential, y);
  if (reference.dim() != potential.dim()) throw DimensionMismatch(reference.dim(), potential.dim());
  return rank_lp(potential, reference, y);
}

RankResult rank_certified(const FittedTransport& fitted, std::span<const double> y, RankMode mode) {
  const auto& potential = fitted.potential();
  check_query(potential, y);
  if (fitted.backend() == Backend::exact1d) {
    RankResult r = mode == RankMode::exact_vertex ? rank_vertices(fitted, y) : rank_lp(potential, fitted.reference(), y);
    // Replace the breakpoint by the target mass at or below y when that point is certified too.
    Vector cdf{empirical_cdf(fitted, y[0])};
    const double v = g_value(potential, cdf, y);
    if (v >= r.upper_bound - 1e-12 * (1.0 + std::abs(r.value))) {
      r.point = std::move(cdf);
      r.value = v;
    }
    return r;
  }
  if (mode == RankMode::exact_vertex) return rank_vertices(fitted, y);
  RankResult lp = rank_lp(potential, fitted.reference(), y);
  // The averaged iterate is kept when it is already optimal: on flat stretches of g
  // it sits inside the maximizing face rather than at one of its vertices.
  Vector avg = rank_supergradient(potential, fitted.reference(), y);
  const double avg_value = g_value(potential, avg, y);
  if (avg_value >= lp.upper_bound - 1e-12 * (1.0 + std::abs(lp.value))) {
    lp.point = std::move(avg);
    lp.value = avg_value;
  }
  return lp;
}

Vector rank(const FittedTransport& fitted, std::span<const double> y, RankMode mode) {
  RankResult r = rank_certified(fitted, y, mode);
  if (!(r.gap() <= kRankCertificate)) {
    throw NumericalError("rank certificate violated (gap " + std::to_string(r.gap()) + ")");
  }
  return std::move(r.point);
}

double conjugate(const FittedTransport& fitted, std::span<const double> y) {
  const RankResult r = rank_certified(fitted.potential(), fitted.reference(), y);
  return r.value;
}

Vector rank_at_sample(const FittedTransport& fitted, std::size_t i, RandomStream& rng) {
  const auto& potential = fitted.potential();
  if (i >= potential.size()) throw InputError("site index out of range");
  const std::size_t d = potential.dim();
  Vector u(d);
  if (fitted.backend() == Backend::exact1d || fitted.backend() == Backend::exact2d) {
    const PowerCell& cell = fitted.cells()[i];
    if (!(cell.measure > 0.0)) throw NumericalError("cannot sample from an empty cell");
    for (int attempt = 0; attempt < 1000; ++attempt) {
      if (d == 1) {
        u[0] = rng.uniform(cell.lower, cell.upper);
      } else {
        const Point2 p = sample_in_polygon(cell.polygon, rng);
        u[0] = p.x;
        u[1] = p.y;
      }
      if (potential.assign(u) == i) return u;
    }
    throw NumericalError("cell draws keep landing on a shared boundary");
  }
  const std::size_t cap = 10000 * potential.size();
  for (std::size_t attempt = 0; attempt < cap; ++attempt) {
    fitted.reference().sample_into(u, rng);
    if (potential.assign(u) == i) return u;
  }
  throw NumericalError("rejection sampling exceeded " + std::to_string(cap) + " proposals for cell " +
                       std::to_string(i));
}

Vector randomized_rank(const FittedTransport& fitted, std::size_t i, std::uint64_t seed) {
  if (i >= fitted.size()) throw InputError("site index out of range");
  RandomStream rng(hash_point(seed, fitted.potential().site(i)));
  return rank_at_sample(fitted, i, rng);
}

Vector rank_at_sample_deterministic(const FittedTransport& fitted, std::size_t i) {
  if (i >= fitted.size()) throw InputError("site index out of range");
  if (!fitted.has_cells()) throw InputError("deterministic ranks need an exact1d or exact2d model");
  const PowerCell& cell = fitted.cells()[i];
  if (fitted.dim() == 1) {
    return {std::abs(cell.upper) >= std::abs(cell.lower) ? cell.upper : cell.lower};
  }
  if (cell.polygon.empty()) throw NumericalError("cell has no vertices");
  Point2 best = cell.polygon.front();
  double best_norm = -1.0;
  for (const auto& v : cell.polygon) {
    const double norm = v.x * v.x + v.y * v.y;
    if (norm > best_norm || (norm == best_norm && (v.x < best.x || (v.x == best.x && v.y < best.y)))) {
      best = v;
      best_norm = norm;
    }
  }
  return {best.x, best.y};
}

double depth_from_rank(std::span<const double> r) {
  double dev = 0.0;
  for (double v : r) dev = std::max(dev, std::abs(v - 0.5));
  return 0.5 - dev;
}

double depth(const FittedTransport& fitted, std::span<const double> x) {
  if (!fitted.reference().is_cube()) throw InputError("depth needs the unit-cube reference");
  return depth_from_rank(rank(fitted, x));
}

double psi_rate(const RateSpec& spec) {
  const double n = spec.n, q = spec.q;
  const double d = static_cast<double>(spec.d);
  if (!(n >= 1.0) || spec.d == 0) throw InputError("psi_rate needs n >= 1 and d >= 1");
  if (!(q > 2.0)) throw InputError("psi_rate needs q > 2");
  if (spec.d <= 4 && q == 4.0) throw InputError("psi_rate is undefined for q = 4 when d <= 4");
  if (spec.d > 4 && std::abs(q - d / (d - 2.0)) < 1e-12) {
    throw InputError("psi_rate is undefined for q = d/(d-2) when d > 4");
  }
  const double moment = std::pow(n, -(q - 2.0) / (q * (d + 2.0)));
  if (spec.d < 4) return std::pow(n, -1.0 / (2.0 * (d + 2.0))) + moment;
  if (spec.d == 4) return std::pow(n, -1.0 / 12.0) * std::pow(std::log1p(n), 1.0 / 6.0) + moment;
  return std::pow(n, -2.0 / (d * (d + 2.0))) + moment;
}

double local_sup_deviation(const FittedTransport& fitted, std::span<const double> center, double radius) {
  if (fitted.backend() != Backend::exact2d) throw InputError("local_sup_deviation needs an exact2d model");
  if (center.size() != 2) throw DimensionMismatch(2, center.size());
  if (!(radius > 0.0)) throw InputError("radius must be positive");
  const double cx = center[0], cy = center[1];
  if (!(cx - radius > 0.0 && cx + radius < 1.0 && cy - radius > 0.0 && cy + radius < 1.0)) {
    throw InputError("ball must lie in the interior of the unit square");
  }
  const double r2 = radius * radius;
  double best = 0.0;
  for (const auto& cell : fitted.cells()) {
    if (cell.polygon.empty()) continue;
    const auto x = fitted.potential().site(cell.site);
    const Point2 site{x[0], x[1]};
    auto consider = [&](Point2 p) { best = std::max(best, std::hypot(p.x - site.x, p.y - site.y)); };
    const auto& poly = cell.polygon;
    for (std::size_t k = 0; k < poly.size(); ++k) {
      const Point2 p = poly[k], q = poly[(k + 1) % poly.size()];
      if ((p.x - cx) * (p.x - cx) + (p.y - cy) * (p.y - cy) <= r2) consider(p);
      // |p + t (q - p) - c|^2 = r^2
      const double dx = q.x - p.x, dy = q.y - p.y;
      const double fx = p.x - cx, fy = p.y - cy;
      const double a = dx * dx + dy * dy;
      if (a == 0.0) continue;
      const double b = 2.0 * (fx * dx + fy * dy);
      const double c = fx * fx + fy * fy - r2;
      const double disc = b * b - 4.0 * a * c;
      if (disc < 0.0) continue;
      const double sq = std::sqrt(disc);
      for (double t : {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)}) {
        if (t >= 0.0 && t <= 1.0) consider({p.x + t * dx, p.y + t * dy});
      }
    }
    double ux = cx - site.x, uy = cy - site.y;
    const double len = std::hypot(ux, uy);
    if (len > 0.0) {
      ux /= len;
      uy /= len;
    } else {
      ux = 1.0;
      uy = 0.0;
    }
    const Point2 far{cx + radius * ux, cy + radius * uy};
    if (polygon_contains(poly, far)) consider(far);
  }
  return best;
}

}  // namespace otranks
