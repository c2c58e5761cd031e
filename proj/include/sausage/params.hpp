#pragma once

#include <stdexcept>

namespace sausage {

// Index alpha in (0,2], dimension d >= 1, sausage radius > 0.  The increment
// sampler additionally rejects alpha < 0.1 (see process.hpp); alpha == 2 is
// the Brownian case with coordinate variance 2t.
struct ProcessParams {
  int d = 1;
  double alpha = 2.0;
  double radius = 1.0;

  void validate() const {
    if (d < 1) throw std::domain_error("dimension must be a positive integer");
    if (!(alpha > 0.0) || alpha > 2.0)
      throw std::domain_error("alpha must lie in (0, 2]");
    if (!(radius > 0.0)) throw std::domain_error("radius must be positive");
  }

  double ratio() const { return static_cast<double>(d) / alpha; }

  // d > alpha: the process is transient and the potential-theory layer applies.
  bool transient() const { return static_cast<double>(d) > alpha; }
};

}  // namespace sausage
