#pragma once

#include <span>
#include <vector>

namespace godel::stats {

double mean(std::span<const double> v);
/// Sample standard deviation (n - 1 denominator).
double stddev(std::span<const double> v);
double standard_error(std::span<const double> v);
double median(std::vector<double> v);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};

LinearFit least_squares(std::span<const double> x, std::span<const double> y);

/// Complementary Kolmogorov distribution, P(K > lambda).
double kolmogorov_q(double lambda);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
KsResult ks_two_sample(std::vector<double> x, std::vector<double> y);

}  // namespace godel::stats
