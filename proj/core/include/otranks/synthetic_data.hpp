#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "otranks/types.hpp"

namespace otranks {

enum class Family {
  banana,
  standard_normal,
  correlated_normal,
  gauss_mixture_2s_ii,
  lognormal_gamma,
  gauss_mixture_indep_iii,
};

std::string_view family_name(Family family) noexcept;
Family parse_family(std::string_view name);

/// n x 2 draws from `family`; every coordinate and component has its own substream.
PointSet generate(Family family, std::size_t n, std::uint64_t seed);

/// (x + r cos(phi), x^2 + r sin(phi)) with r = 0.2 z (1 + (1 - |x|) / 2).
Vector banana_point(double x, double phi, double z);
PointSet banana(std::size_t n, std::uint64_t seed);

/// Two-sample settings: 1 = N2(0, I), 2 = the two-component Gaussian mixture, 3 = banana.
PointSet gauss_mixture_2s(int setting, std::size_t n, std::uint64_t seed);

/// Independence settings: 1 = N(0,1) x N(0,1), 2 = lognormal x Gamma, 3 = two mixtures.
/// Normal components N(m, v) are parameterized by mean and variance.
PointSet indep_setting(int setting, std::size_t n, std::uint64_t seed);

/// Bivariate normal with unit variances and correlation rho.
PointSet correlated_normal(std::size_t n, std::uint64_t seed, double rho = 0.99);

}  // namespace otranks
