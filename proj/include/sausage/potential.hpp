#pragma once

#include <vector>

#include "sausage/params.hpp"

namespace sausage {

// pi / sqrt(8): the constant in the small-deviation (liminf) normalizer.
inline constexpr double kChungConstant = 1.1107207345395916;

// exp(e): lower end of the domain on which log(log(t)) >= 1.
inline constexpr double kLogLogThreshold = 15.154262241479264;

struct PotentialContext {
  ProcessParams params;
  double quadrature_tolerance = 1e-8;

  // The closed forms below require transience, d > alpha.
  void validate() const {
    params.validate();
    if (!params.transient())
      throw std::domain_error("potential theory requires d > alpha");
  }
};

// Capacity of the closed unit ball under the plain Riesz kernel |x|^{alpha-d}:
//   Gamma(d/2) / (Gamma(alpha/2) * Gamma(1 + (d-alpha)/2)).
double capacity_unit_ball(int d, double alpha);

// A(d, alpha) = Gamma((d-alpha)/2) / (2^alpha pi^{d/2} Gamma(alpha/2)),
// the constant relating the Green function to the Riesz kernel.
double riesz_constant(int d, double alpha);

// Capacity of the unit ball normalized against the Green function
// A(d,alpha)|x|^{alpha-d} instead of the bare kernel:
//   capacity_unit_ball / riesz_constant.
// This is the growth rate of the expected sausage volume, E[V_t]/t -> Cap(B),
// and the centering constant used throughout the experiments.  For alpha = 2,
// d = 3 it equals 4*pi.
double capacity_unit_ball_green(int d, double alpha);

// G(x) = A(d,alpha) |x|^{alpha-d} for x != 0; diverges at the origin.
double green_function_radial(double r, int d, double alpha);
double green_function(const std::vector<double>& x, const PotentialContext& ctx);

// Probability that the path started at y ever hits the closed unit ball,
//   phi(y) = c(d,alpha) * Integral_B |y-w|^{alpha-d} (1-|w|^2)^{-alpha/2} dw,
//   c(d,alpha) = Gamma(d/2) sin(pi alpha/2) / pi^{d/2+1},
// evaluated by adaptive Gauss-Kronrod quadrature.  Requires alpha < 2 (the
// Brownian case has its own closed form below); equals 1 on the ball.
double phi_radial(double r, const PotentialContext& ctx);
double phi(const std::vector<double>& y, const PotentialContext& ctx);

// Brownian hitting probability of the unit ball, |y|^{2-d} for d >= 3.
double phi_brownian_radial(double r, int d);
double phi_brownian(const std::vector<double>& y, int d);

// Variance growth scale h(t) for the second-order analysis:
//   d/alpha > 2       -> 1
//   d/alpha = 2       -> log(t + e)      (within 1e-12 of 2)
//   1 < d/alpha < 2   -> t^{2 - d/alpha}
// d/alpha <= 1 is outside the transient regime and rejected.
double h_function(double t, int d, double alpha);

// limsup normalizer sqrt(2 sigma^2 t log log t); requires t >= exp(e).
double lil_normalizer_limsup(double t, double sigma);

// liminf normalizer sigma sqrt(t / log log t); the classical small-deviation
// constant pi/sqrt(8) multiplies it in the statements.
double lil_normalizer_liminf(double t, double sigma);

// Integral over the unit ball of (1-|w|^2)^{-alpha/2} dw: the normalizer of
// the equilibrium density.  Evaluated by a tanh-sinh rule that resolves the
// boundary singularity; the closed form is pinned in the unit tests.
double equilibrium_mass(int d, double alpha);

// (G * mu_B)(y) for the equilibrium measure mu_B of total mass
// capacity_unit_ball_green, evaluated on a quadrature route independent of
// phi_radial.  Equals phi(y) off the ball and 1 on it.
double green_equilibrium_convolution(double r, const PotentialContext& ctx);

}  // namespace sausage
