#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace halfheavy::stats {

double mean(std::span<const double> x);

/// Unbiased sample variance.
double variance(std::span<const double> x);

/// Splits x (in order) into `blocks` contiguous blocks of near-equal size,
/// averages each and returns the median of the block means.
double median_of_means(std::span<const double> x, std::size_t blocks);

double normal_cdf(double x);

struct Moments {
  double mean = 0.0;
  double sd = 0.0;  // population standard deviation
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};
Moments moments(std::span<const double> x);

/// sup_x |F_n(x) - Phi(x)| for the given (already standardised) sample.
double ks_distance_normal(std::span<const double> x);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

/// Ordinary least squares y = intercept + slope * x. Needs >= 3 points for
/// a standard error (exactly zero residual gives stderr 0).
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace halfheavy::stats
