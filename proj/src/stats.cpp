#include "sausage/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sausage {

double sample_mean(const std::vector<double>& xs) {
  if (xs.empty()) throw std::domain_error("mean of empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_variance(const std::vector<double>& xs) {
  if (xs.size() < 2) throw std::domain_error("variance needs at least 2 points");
  const double m = sample_mean(xs);
  double s2 = 0.0;
  for (double x : xs) s2 += (x - m) * (x - m);
  return s2 / static_cast<double>(xs.size() - 1);
}

Moments sample_moments(const std::vector<double>& xs) {
  if (xs.size() < 2) throw std::domain_error("moments need at least 2 points");
  Moments m;
  m.n = xs.size();
  m.mean = sample_mean(xs);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d = x - m.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  const double n = static_cast<double>(m.n);
  m.variance = m2 / (n - 1.0);
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (m2 > 0.0) {
    m.skewness = m3 / std::pow(m2, 1.5);
    m.kurtosis = m4 / (m2 * m2);
  }
  return m;
}

double pearson_correlation(const std::vector<double>& xs,
                           const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::domain_error("correlation needs two equal-length samples");
  const double mx = sample_mean(xs), my = sample_mean(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw std::domain_error("correlation of a constant sample");
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> covariance_matrix(
    const std::vector<std::vector<double>>& cols) {
  const std::size_t k = cols.size();
  if (k == 0) throw std::domain_error("covariance of no columns");
  const std::size_t n = cols[0].size();
  if (n < 2) throw std::domain_error("covariance needs at least 2 rows");
  for (const auto& c : cols)
    if (c.size() != n) throw std::domain_error("ragged covariance input");
  std::vector<double> means(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) means[j] = sample_mean(cols[j]);
  std::vector<double> cov(k * k, 0.0);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a; b < k; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        s += (cols[a][i] - means[a]) * (cols[b][i] - means[b]);
      cov[a * k + b] = cov[b * k + a] = s / static_cast<double>(n - 1);
    }
  return cov;
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double ks_statistic(std::vector<double> sample,
                    const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::domain_error("KS of empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, f - static_cast<double>(i) / n);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::domain_error("KS of empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() || j < b.size()) {
    double x;
    if (j >= b.size() || (i < a.size() && a[i] <= b[j]))
      x = a[i];
    else
      x = b[j];
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

double ks_critical_one_sample(std::size_t n) {
  if (n == 0) throw std::domain_error("KS critical value needs n > 0");
  return 1.63 / std::sqrt(static_cast<double>(n));
}

double ks_critical_two_sample(std::size_t n1, std::size_t n2) {
  if (n1 == 0 || n2 == 0) throw std::domain_error("KS critical value needs n > 0");
  const double a = static_cast<double>(n1), b = static_cast<double>(n2);
  return 1.63 * std::sqrt((a + b) / (a * b));
}

}  // namespace sausage
