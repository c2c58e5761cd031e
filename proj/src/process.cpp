#include "sausage/process.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sausage {

double sample_subordinator_increment(double rho, double dt, RandomStream& stream) {
  if (!(rho > 0.0) || !(rho < 1.0))
    throw std::domain_error("subordinator index must lie in (0, 1)");
  if (!(dt > 0.0)) throw std::domain_error("time step must be positive");
  const double u = std::numbers::pi * stream.open01();
  const double e = stream.exponential();
  const double log_a =
      (rho * std::log(std::sin(rho * u)) +
       (1.0 - rho) * std::log(std::sin((1.0 - rho) * u)) -
       std::log(std::sin(u))) /
      (1.0 - rho);
  double log_s = std::log(dt) / rho + (1.0 - rho) / rho * (log_a - std::log(e));
  // Overflow guard for astronomically unlikely (u, e) corners.
  if (log_s > 700.0) log_s = 700.0;
  return std::exp(log_s);
}

void sample_increment(const ProcessParams& params, double dt,
                      RandomStream& stream, double* out) {
  params.validate();
  if (!(dt > 0.0)) throw std::domain_error("time step must be positive");
  if (params.alpha == 2.0) {
    const double scale = std::sqrt(2.0 * dt);
    for (int i = 0; i < params.d; ++i) out[i] = scale * stream.gaussian();
    return;
  }
  if (params.alpha < 0.1)
    throw std::domain_error("alpha below 0.1 is outside the sampler's range");
  const double s = sample_subordinator_increment(params.alpha / 2.0, dt, stream);
  const double scale = std::sqrt(2.0 * s);
  for (int i = 0; i < params.d; ++i) out[i] = scale * stream.gaussian();
}

std::vector<double> sample_increment_vec(const ProcessParams& params, double dt,
                                         RandomStream& stream) {
  std::vector<double> out(static_cast<std::size_t>(params.d));
  sample_increment(params, dt, stream, out.data());
  return out;
}

PathSkeleton simulate_skeleton(const ProcessParams& params, double t_end,
                               double mesh, RandomStream& stream) {
  params.validate();
  if (!(t_end > 0.0)) throw std::domain_error("horizon must be positive");
  if (!(mesh > 0.0) || mesh > t_end)
    throw std::domain_error("mesh must lie in (0, t_end]");

  PathSkeleton path;
  path.params = params;
  const double eps = 1e-9 * std::max(1.0, t_end);
  const auto n_full = static_cast<std::size_t>(std::floor(t_end / mesh + 1e-9));
  path.times.reserve(n_full + 2);
  for (std::size_t k = 0; k <= n_full; ++k)
    path.times.push_back(static_cast<double>(k) * mesh);
  if (std::abs(path.times.back() - t_end) <= eps)
    path.times.back() = t_end;
  else
    path.times.push_back(t_end);

  const auto d = static_cast<std::size_t>(params.d);
  const std::size_t n = path.times.size();
  path.positions.assign(n * d, 0.0);
  std::vector<double> step(d);
  for (std::size_t k = 1; k < n; ++k) {
    const double dt = path.times[k] - path.times[k - 1];
    sample_increment(params, dt, stream, step.data());
    for (std::size_t i = 0; i < d; ++i)
      path.positions[k * d + i] = path.positions[(k - 1) * d + i] + step[i];
  }
  return path;
}

PathSkeleton subsample_skeleton(const PathSkeleton& path, std::size_t factor) {
  if (factor == 0) throw std::domain_error("subsample factor must be positive");
  if (path.size() == 0) throw std::domain_error("empty skeleton");
  PathSkeleton out;
  out.params = path.params;
  const auto d = static_cast<std::size_t>(path.params.d);
  for (std::size_t i = 0; i < path.size(); i += factor) {
    out.times.push_back(path.times[i]);
    for (std::size_t j = 0; j < d; ++j)
      out.positions.push_back(path.positions[i * d + j]);
  }
  const std::size_t last = path.size() - 1;
  if (out.times.back() != path.times[last]) {
    out.times.push_back(path.times[last]);
    for (std::size_t j = 0; j < d; ++j)
      out.positions.push_back(path.positions[last * d + j]);
  }
  return out;
}

CharFnEstimate empirical_char_function(const std::vector<double>& samples, int d,
                                       const std::vector<double>& xi) {
  if (d < 1 || xi.size() != static_cast<std::size_t>(d))
    throw std::domain_error("frequency dimension mismatch");
  const auto dd = static_cast<std::size_t>(d);
  if (samples.empty() || samples.size() % dd != 0)
    throw std::domain_error("flat sample array must hold N points of dimension d");
  const std::size_t n = samples.size() / dd;
  double re = 0.0, im = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double dot = 0.0;
    for (std::size_t i = 0; i < dd; ++i) dot += xi[i] * samples[j * dd + i];
    re += std::cos(dot);
    im += std::sin(dot);
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  return CharFnEstimate{{re * inv_n, im * inv_n},
                        1.0 / std::sqrt(static_cast<double>(n))};
}

}  // namespace sausage
