#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "regedge/rng.hpp"

namespace regedge::stats {

/// Pairwise summation; the result does not depend on thread scheduling.
double pairwise_sum(std::span<const double> x);
double mean(std::span<const double> x);
double variance(std::span<const double> x);  // unbiased
double median(std::span<const double> x);
double quantile(std::span<const double> x, double q);  // linear interpolation
double correlation(std::span<const double> x, std::span<const double> y);

/// Kolmogorov survival function P(K > t).
double kolmogorov_sf(double t);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test, asymptotic p-value.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);
/// One-sample statistic sup |F_n - F|.
KsResult ks_one_sample(std::span<const double> x, const std::function<double(double)>& cdf);

/// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);
/// Upper tail of the chi-square distribution.
double chi_square_sf(double statistic, double dof);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};
/// Goodness of fit of `counts` to equal cell probabilities.
ChiSquareResult chi_square_uniform(std::span<const std::int64_t> counts);

/// Two-sided exact sign test; ties are dropped.
double sign_test(int positive, int negative);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};
/// Percentile bootstrap interval for `statistic`.
Interval bootstrap_ci(std::span<const double> x, const std::function<double(std::span<const double>)>& statistic,
                      int resamples, double level, Rng& rng);

/// Ordinary least squares slope of y on x.
double ols_slope(std::span<const double> x, std::span<const double> y);

}  // namespace regedge::stats
