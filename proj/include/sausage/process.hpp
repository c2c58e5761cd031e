#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "sausage/params.hpp"
#include "sausage/rng.hpp"

namespace sausage {

// Discrete skeleton of one path: positions at times[0] = 0 < ... <= t_end,
// flat row-major storage, positions[0..d) is the origin.
struct PathSkeleton {
  ProcessParams params;
  std::vector<double> times;
  std::vector<double> positions;

  std::size_t size() const { return times.size(); }
  const double* position(std::size_t i) const {
    return positions.data() + i * static_cast<std::size_t>(params.d);
  }
};

// One increment of the stable subordinator with index rho in (0,1) over time
// dt: Kanter's representation, evaluated in log space.  Satisfies
// E[exp(-lambda S)] = exp(-dt lambda^rho).
double sample_subordinator_increment(double rho, double dt, RandomStream& stream);

// One spatial increment over dt, written to out[0..d).  Characteristic
// function exp(-dt |xi|^alpha): alpha = 2 is Brownian with coordinate
// variance 2 dt, alpha < 2 is Gaussian subordination by the alpha/2-stable
// clock.  alpha below 0.1 is rejected (the subordination exponent blows up).
void sample_increment(const ProcessParams& params, double dt,
                      RandomStream& stream, double* out);
std::vector<double> sample_increment_vec(const ProcessParams& params, double dt,
                                         RandomStream& stream);

// Path on the grid {0, mesh, 2*mesh, ...} with the final point exactly t_end.
PathSkeleton simulate_skeleton(const ProcessParams& params, double t_end,
                               double mesh, RandomStream& stream);

// Every factor-th point, always keeping the first and last.
PathSkeleton subsample_skeleton(const PathSkeleton& path, std::size_t factor);

struct CharFnEstimate {
  std::complex<double> value;
  double stat_error;  // 1/sqrt(N) envelope for a modulus-1 summand
};

// Empirical characteristic function (1/N) sum exp(i <xi, X_j>) over N points
// stored flat row-major.
CharFnEstimate empirical_char_function(const std::vector<double>& samples, int d,
                                       const std::vector<double>& xi);

}  // namespace sausage
