#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace otranks {

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// P(K > x) for the Kolmogorov distribution.
double kolmogorov_sf(double x);

/// One-sample Kolmogorov-Smirnov test against Uniform[0,1].
KsResult ks_uniform(std::span<const double> sample);

/// Two-sample Kolmogorov-Smirnov test (asymptotic p-value).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Pearson chi-square test of equal cell probabilities. Returns the p-value.
double chi_square_uniform(std::span<const std::size_t> counts);

double median(std::vector<double> values);
double mean(std::span<const double> values);

/// Least-squares slope of y on x.
double ols_slope(std::span<const double> x, std::span<const double> y);

}  // namespace otranks
