#include "otranks/synthetic_data.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "otranks/rng.hpp"

namespace otranks {

namespace {

constexpr std::uint64_t kFirst = 1, kSecond = 2, kThird = 3, kChoice = 4;

struct Component {
  double mean;
  double variance;
};

template <std::size_t K>
double draw_mixture(const double (&weights)[K], const Component (&comps)[K], RandomStream& choice,
                    RandomStream& value) {
  const double u = choice.uniform();
  std::size_t k = 0;
  double acc = weights[0];
  while (k + 1 < K && u >= acc) acc += weights[++k];
  return value.normal(comps[k].mean, std::sqrt(comps[k].variance));
}

void check_n(std::size_t n) {
  if (n == 0) throw InputError("sample size must be at least 1");
}

}  // namespace

std::string_view family_name(Family family) noexcept {
  switch (family) {
    case Family::banana:
      return "banana";
    case Family::standard_normal:
      return "standard-normal";
    case Family::correlated_normal:
      return "correlated-normal";
    case Family::gauss_mixture_2s_ii:
      return "gauss-mixture-2s-ii";
    case Family::lognormal_gamma:
      return "lognormal-gamma";
    case Family::gauss_mixture_indep_iii:
      return "gauss-mixture-indep-iii";
  }
  return "banana";
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::banana, Family::standard_normal, Family::correlated_normal, Family::gauss_mixture_2s_ii,
                   Family::lognormal_gamma, Family::gauss_mixture_indep_iii}) {
    if (family_name(f) == name) return f;
  }
  throw InputError("unknown family '" + std::string(name) + "'");
}

Vector banana_point(double x, double phi, double z) {
  const double r = 0.2 * z * (1.0 + (1.0 - std::abs(x)) / 2.0);
  return {x + r * std::cos(phi), x * x + r * std::sin(phi)};
}

PointSet banana(std::size_t n, std::uint64_t seed) {
  check_n(n);
  RandomStream xs(derive_seed(seed, kFirst)), phis(derive_seed(seed, kSecond)), zs(derive_seed(seed, kThird));
  PointSet out(2);
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = xs.uniform(-1.0, 1.0);
    const double phi = phis.uniform(0.0, 2.0 * std::numbers::pi);
    const double z = zs.uniform();
    out.push_back(banana_point(x, phi, z));
  }
  return out;
}

PointSet correlated_normal(std::size_t n, std::uint64_t seed, double rho) {
  check_n(n);
  if (!(rho > -1.0 && rho < 1.0)) throw InputError("correlation must lie in (-1, 1)");
  RandomStream a(derive_seed(seed, kFirst)), b(derive_seed(seed, kSecond));
  const double tail = std::sqrt(1.0 - rho * rho);
  PointSet out(2);
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z1 = a.normal(), z2 = b.normal();
    const double p[2] = {z1, rho * z1 + tail * z2};
    out.push_back(p);
  }
  return out;
}

PointSet gauss_mixture_2s(int setting, std::size_t n, std::uint64_t seed) {
  check_n(n);
  switch (setting) {
    case 1:
      return correlated_normal(n, seed, 0.0);
    case 2: {
      RandomStream choice(derive_seed(seed, kChoice)), first(derive_seed(seed, kFirst)),
          second(derive_seed(seed, kSecond));
      // 1/2 N((5,0), 2 I) + 1/2 N((0,5), [[5,2],[2,5]]); the second via its Cholesky factor.
      const double l11 = std::sqrt(5.0), l21 = 2.0 / std::sqrt(5.0), l22 = std::sqrt(5.0 - 0.8);
      PointSet out(2);
      out.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        if (choice.uniform() < 0.5) {
          const double p[2] = {first.normal(5.0, std::sqrt(2.0)), first.normal(0.0, std::sqrt(2.0))};
          out.push_back(p);
        } else {
          const double z1 = second.normal(), z2 = second.normal();
          const double p[2] = {l11 * z1, 5.0 + l21 * z1 + l22 * z2};
          out.push_back(p);
        }
      }
      return out;
    }
    case 3:
      return banana(n, seed);
    default:
      throw InputError("two-sample setting must be 1, 2 or 3");
  }
}

PointSet indep_setting(int setting, std::size_t n, std::uint64_t seed) {
  check_n(n);
  RandomStream xs(derive_seed(seed, kFirst)), ys(derive_seed(seed, kSecond));
  RandomStream xc(derive_seed(seed, kChoice)), yc(derive_seed(seed, kThird));
  PointSet out(2);
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double p[2];
    switch (setting) {
      case 1:
        p[0] = xs.normal();
        p[1] = ys.normal();
        break;
      case 2:
        p[0] = std::exp(0.5 * xs.normal());
        p[1] = ys.gamma(3.0, 2.0);
        break;
      case 3: {
        static constexpr double wx[2] = {0.25, 0.75};
        static constexpr Component cx[2] = {{-1.0, 2.0}, {5.0, 3.0}};
        static constexpr double wy[3] = {0.3, 0.3, 0.4};
        static constexpr Component cy[3] = {{0.0, 0.5}, {5.0, 2.0}, {-5.0, 1.0}};
        p[0] = draw_mixture(wx, cx, xc, xs);
        p[1] = draw_mixture(wy, cy, yc, ys);
        break;
      }
      default:
        throw InputError("independence setting must be 1, 2 or 3");
    }
    out.push_back(p);
  }
  return out;
}

PointSet generate(Family family, std::size_t n, std::uint64_t seed) {
  switch (family) {
    case Family::banana:
      return banana(n, seed);
    case Family::standard_normal:
      return gauss_mixture_2s(1, n, seed);
    case Family::correlated_normal:
      return correlated_normal(n, seed);
    case Family::gauss_mixture_2s_ii:
      return gauss_mixture_2s(2, n, seed);
    case Family::lognormal_gamma:
      return indep_setting(2, n, seed);
    case Family::gauss_mixture_indep_iii:
      return indep_setting(3, n, seed);
  }
  throw InputError("unknown family");
}

}  // namespace otranks
