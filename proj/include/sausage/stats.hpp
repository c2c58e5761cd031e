#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace sausage {

struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased (n-1 denominator)
  double skewness = 0.0;  // biased central-moment ratio m3 / m2^{3/2}
  double kurtosis = 0.0;  // m4 / m2^2, 3 for the normal
};

Moments sample_moments(const std::vector<double>& xs);
double sample_mean(const std::vector<double>& xs);
double sample_variance(const std::vector<double>& xs);
double pearson_correlation(const std::vector<double>& xs,
                           const std::vector<double>& ys);

// Unbiased covariance matrix of column vectors, row-major k x k.
std::vector<double> covariance_matrix(const std::vector<std::vector<double>>& cols);

double normal_cdf(double x);

// One-sample Kolmogorov-Smirnov distance sup_x |F_n(x) - F(x)| against a
// continuous cdf; evaluates both one-sided gaps at each order statistic.
double ks_statistic(std::vector<double> sample,
                    const std::function<double(double)>& cdf);

// Two-sample KS distance; ties across and within samples are handled by
// comparing the empirical cdfs only at points where all equal values have
// been consumed.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Asymptotic 1% critical values, c = 1.63.
double ks_critical_one_sample(std::size_t n);
double ks_critical_two_sample(std::size_t n1, std::size_t n2);

}  // namespace sausage
