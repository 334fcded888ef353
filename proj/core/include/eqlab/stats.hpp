#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace eqlab {

/// A Monte Carlo estimate with its standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;

  /// |value - target| measured in standard errors (infinite for a zero-error estimate that misses).
  double z_score(double target) const;
};

/// Welford accumulator.
class RunningStats {
 public:
  void add(double x);
  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double variance() const;  // unbiased
  double stddev() const;
  double std_error() const;
  Estimate estimate() const { return {mean(), std_error()}; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

Estimate mean_estimate(std::span<const double> xs);
double median(std::vector<double> xs);
double sample_stddev(std::span<const double> xs);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval for a binomial proportion; z = 1.96 gives 95%.
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.96);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_std_error = 0.0;
};

/// Ordinary least squares y ~ a + b x. Needs at least two distinct x.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

/// Two-sample Kolmogorov-Smirnov statistic sup |F1 - F2|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

/// Kahan-compensated sum.
double stable_sum(std::span<const double> xs);

}  // namespace eqlab
