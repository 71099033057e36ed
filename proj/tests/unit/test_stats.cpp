#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "godel/stats.hpp"
#include "test_util.hpp"

using namespace godel;

TEST(Stats, MeanStddevMedian) {
  const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
  EXPECT_DOUBLE_EQ(stats::mean(v), 5.0);
  EXPECT_NEAR(stats::stddev(v), std::sqrt(32.0 / 7.0), 1e-15);
  EXPECT_NEAR(stats::standard_error(v), std::sqrt(32.0 / 7.0) / std::sqrt(8.0), 1e-15);
  EXPECT_DOUBLE_EQ(stats::median(v), 4.5);
  EXPECT_DOUBLE_EQ(stats::median({3, 1, 2}), 2.0);
}

TEST(Stats, LeastSquaresExactLine) {
  std::vector<double> x, y;
  for (int i = 0; i < 10; ++i) {
    x.push_back(i);
    y.push_back(1.5 * i - 2.0);
  }
  const auto f = stats::least_squares(x, y);
  EXPECT_NEAR(f.slope, 1.5, 1e-14);
  EXPECT_NEAR(f.intercept, -2.0, 1e-13);
  EXPECT_NEAR(f.slope_se, 0.0, 1e-12);
}

TEST(Stats, LeastSquaresSlopeErrorMatchesTextbook) {
  // textbook slope SE: sqrt(SSR / (n-2) / Sxx)
  godel::testing::Sampler rng(3);
  std::vector<double> x, y;
  for (int i = 0; i < 50; ++i) {
    x.push_back(i * 0.1);
    y.push_back(0.7 * i * 0.1 + rng.normal());
  }
  const auto f = stats::least_squares(x, y);
  const double xm = stats::mean(x);
  double sxx = 0, ssr = 0;
  for (double xi : x) sxx += (xi - xm) * (xi - xm);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    ssr += r * r;
  }
  EXPECT_NEAR(f.slope_se, std::sqrt(ssr / 48.0 / sxx), 1e-12);
}

TEST(Stats, KolmogorovTail) {
  // reference values from the alternating series, summed to convergence offline
  EXPECT_NEAR(stats::kolmogorov_q(1.36), 0.049485876755377876, 1e-12);
  EXPECT_NEAR(stats::kolmogorov_q(1.0), 0.26999967167735456, 1e-12);
  EXPECT_NEAR(stats::kolmogorov_q(0.5), 0.9639452436648751, 1e-9);
  EXPECT_NEAR(stats::kolmogorov_q(0.0), 1.0, 1e-12);
  EXPECT_NEAR(stats::kolmogorov_q(5.0), 0.0, 1e-20);
}

namespace {

double brute_ks(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> all(x);
  all.insert(all.end(), y.begin(), y.end());
  double d = 0;
  for (double t : all) {
    const double fx = std::count_if(x.begin(), x.end(), [t](double v) { return v <= t; }) / double(x.size());
    const double fy = std::count_if(y.begin(), y.end(), [t](double v) { return v <= t; }) / double(y.size());
    d = std::max(d, std::abs(fx - fy));
  }
  return d;
}

}  // namespace

TEST(Stats, KsStatisticMatchesBruteForce) {
  godel::testing::Sampler rng(4);
  for (int n = 0; n < 20; ++n) {
    std::vector<double> x(30 + n), y(45 - n);
    for (auto& v : x) v = rng.normal();
    for (auto& v : y) v = std::round(4 * (rng.normal() + 0.3)) / 4;  // ties included
    const auto r = stats::ks_two_sample(x, y);
    EXPECT_NEAR(r.statistic, brute_ks(x, y), 1e-15);
    const double ne = double(x.size()) * y.size() / (x.size() + y.size());
    const double lam = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * r.statistic;
    EXPECT_NEAR(r.p_value, stats::kolmogorov_q(lam), 1e-15);
  }
}

TEST(Stats, KsSeparatesShiftedSamples) {
  godel::testing::Sampler rng(5);
  std::vector<double> x(2000), y(2000), z(2000);
  for (auto& v : x) v = rng.normal();
  for (auto& v : y) v = rng.normal();
  for (auto& v : z) v = rng.normal() + 0.3;
  EXPECT_GT(stats::ks_two_sample(x, y).p_value, 0.01);
  EXPECT_LT(stats::ks_two_sample(x, z).p_value, 1e-6);
}
