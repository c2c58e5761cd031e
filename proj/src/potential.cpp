#include "sausage/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace sausage {
namespace {

constexpr double kPi = std::numbers::pi;

double require_transient(int d, double alpha) {
  if (d < 1) throw std::domain_error("dimension must be a positive integer");
  if (!(alpha > 0.0) || alpha > 2.0)
    throw std::domain_error("alpha must lie in (0, 2]");
  if (!(static_cast<double>(d) > alpha))
    throw std::domain_error("closed form requires d > alpha");
  return static_cast<double>(d);
}

// Surface area of the unit sphere S^{k} in R^{k+1}.
double sphere_area(int k) {
  const double kk = static_cast<double>(k + 1);
  return 2.0 * std::pow(kPi, kk / 2.0) / std::exp(std::lgamma(kk / 2.0));
}

// ---------------------------------------------------------------------------
// Gauss-Kronrod 15(7) with a globally adaptive driver.
// ---------------------------------------------------------------------------

// QUADPACK dqk15 abscissae/weights on [-1,1]; nodes listed from the boundary
// inward, xk[7] = 0.  Even-index nodes carry the embedded 7-point Gauss rule.
constexpr double kKronrodX[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
constexpr double kKronrodW[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kGaussW[4] = {0.129484966168870, 0.279705391489277,
                               0.381830050505119, 0.417959183673469};

template <class F>
void gk15(const F& f, double a, double b, double& integral, double& error) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double f0 = f(c);
  double k = kKronrodW[7] * f0;
  double g = kGaussW[3] * f0;
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kKronrodX[i];
    const double fsum = f(c - dx) + f(c + dx);
    k += kKronrodW[i] * fsum;
    if (i % 2 == 1) g += kGaussW[i / 2] * fsum;
  }
  integral = k * h;
  error = std::abs((k - g) * h);
}

struct Segment {
  double a, b, integral, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

// Refines the worst segment until the summed error estimate meets tol_abs.
template <class F>
double adaptive_quadrature(const F& f, double a, double b, double tol_abs,
                           std::size_t max_segments = 4000) {
  std::vector<Segment> heap;
  Segment s{a, b, 0.0, 0.0};
  gk15(f, a, b, s.integral, s.error);
  heap.push_back(s);
  double total_err = s.error;
  const double min_width = 8e-16 * (std::abs(a) + std::abs(b) + 1.0);
  while (total_err > tol_abs) {
    std::pop_heap(heap.begin(), heap.end());
    Segment worst = heap.back();
    heap.pop_back();
    if (heap.size() + 2 > max_segments || worst.b - worst.a < min_width)
      throw std::runtime_error("quadrature budget exhausted");
    total_err -= worst.error;
    const double mid = 0.5 * (worst.a + worst.b);
    Segment left{worst.a, mid, 0.0, 0.0}, right{mid, worst.b, 0.0, 0.0};
    gk15(f, left.a, left.b, left.integral, left.error);
    gk15(f, right.a, right.b, right.integral, right.error);
    total_err += left.error + right.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end());
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end());
  }
  double sum = 0.0;
  for (const auto& seg : heap) sum += seg.integral;
  return sum;
}

// ---------------------------------------------------------------------------
// Fixed-order Gauss-Legendre (nodes by Newton iteration, cached per order).
// ---------------------------------------------------------------------------

struct GlRule {
  std::vector<double> x, w;  // nodes/weights on [-1,1]
};

const GlRule& gauss_legendre_64() {
  static const GlRule rule = [] {
    constexpr int n = 64;
    GlRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      r.x[i] = -x;
      r.x[n - 1 - i] = x;
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      r.w[i] = r.w[n - 1 - i] = w;
    }
    return r;
  }();
  return rule;
}

template <class F>
double gl64(const F& f, double a, double b) {
  const GlRule& r = gauss_legendre_64();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * f(c + h * r.x[i]);
  return s * h;
}

// ---------------------------------------------------------------------------
// tanh-sinh rule on (-1,1).  The integrand receives the node u together with
// exact endpoint distances 1-u and 1+u, so inverse-power endpoint
// singularities never suffer cancellation.  Truncation is by tail size.
// ---------------------------------------------------------------------------

template <class F>
double tanh_sinh(const F& f) {
  const double h = 1.0 / 64.0;
  double sum = 0.0;
  for (int side = 0; side < 2; ++side) {
    int quiet = 0;
    for (int j = (side == 0 ? 0 : 1); j < 4000; ++j) {
      const double t = (side == 0 ? j : -j) * h;
      const double y = 0.5 * kPi * std::sinh(t);
      const double w = 0.5 * kPi * std::cosh(t) / std::pow(std::cosh(y), 2);
      const double um = 2.0 / (std::exp(2.0 * y) + 1.0);   // 1 - u
      const double up = 2.0 / (std::exp(-2.0 * y) + 1.0);  // 1 + u
      if (um <= 0.0 || up <= 0.0 || w < 1e-280) break;
      const double u = (side == 0 ? 1.0 - um : up - 1.0);
      const double term = w * f(u, um, up);
      if (!std::isfinite(term))
        throw std::runtime_error("quadrature integrand not finite");
      sum += term;
      if (std::abs(term) < 1e-18 * (1.0 + std::abs(sum))) {
        if (++quiet >= 2) break;
      } else {
        quiet = 0;
      }
    }
  }
  return sum * h;
}

// Maps (0,1) with the singular behavior at 1 onto the canonical rule.
template <class F>
double tanh_sinh_01(const F& f) {
  // x = (1+u)/2, 1-x = (1-u)/2
  return 0.5 * tanh_sinh([&](double, double um, double up) {
    return f(0.5 * up, 0.5 * um);
  });
}

// ---------------------------------------------------------------------------
// Angular factor of the ball integral:
//   F(rho) = Integral_0^pi (r^2 + rho^2 - 2 r rho cos t)^{(alpha-d)/2} sin^{d-2} t dt
// Smooth for r > 1 >= rho.
// ---------------------------------------------------------------------------

double angular_factor_gl(double r, double rho, int d, double alpha) {
  const double p = 0.5 * (alpha - d);
  return gl64(
      [&](double t) {
        const double q2 = r * r + rho * rho - 2.0 * r * rho * std::cos(t);
        double v = std::pow(q2, p);
        if (d > 2) v *= std::pow(std::sin(t), d - 2);
        return v;
      },
      0.0, kPi);
}

double angular_factor_gk(double r, double rho, int d, double alpha,
                         double tol_abs) {
  const double p = 0.5 * (alpha - d);
  return adaptive_quadrature(
      [&](double t) {
        const double q2 = r * r + rho * rho - 2.0 * r * rho * std::cos(t);
        double v = std::pow(q2, p);
        if (d > 2) v *= std::pow(std::sin(t), d - 2);
        return v;
      },
      0.0, kPi, tol_abs, 400);
}

// Normalizing constant of phi: Gamma(d/2) sin(pi alpha/2) / pi^{d/2+1}.
double phi_constant(int d, double alpha) {
  const double dd = static_cast<double>(d);
  return std::exp(std::lgamma(dd / 2.0) - (dd / 2.0 + 1.0) * std::log(kPi)) *
         std::sin(kPi * alpha / 2.0);
}

// Raw ball integral Integral_B |y-w|^{alpha-d} (1-|w|^2)^{-alpha/2} dw for
// |y| = r > 1, via the adaptive Gauss-Kronrod route.  The radial variable is
// substituted twice, rho = cos(s^2), which removes the endpoint singularity
// of (1-rho^2)^{-alpha/2} exactly for alpha = 3/2 and weakens it otherwise.
double ball_integral_gk(double r, int d, double alpha, double tol_abs) {
  const double s_max = std::sqrt(0.5 * kPi);
  if (d == 1) {
    return adaptive_quadrature(
        [&](double s) {
          const double s2 = s * s;
          const double w = std::cos(s2);
          const double sin_s2 = std::sin(s2);
          return 2.0 * s * std::pow(sin_s2, 1.0 - alpha) *
                 (std::pow(r - w, alpha - 1.0) + std::pow(r + w, alpha - 1.0));
        },
        0.0, s_max, tol_abs);
  }
  const double ring = sphere_area(d - 2);
  const double outer_tol = tol_abs / ring;
  const double inner_tol = 0.1 * outer_tol;
  return ring * adaptive_quadrature(
                    [&](double s) {
                      const double s2 = s * s;
                      const double rho = std::cos(s2);
                      const double sin_s2 = std::sin(s2);
                      return 2.0 * s * std::pow(sin_s2, 1.0 - alpha) *
                             std::pow(rho, d - 1) *
                             angular_factor_gk(r, rho, d, alpha, inner_tol);
                    },
                    0.0, s_max, outer_tol);
}

// Same ball integral on the independent route: tanh-sinh in the radial
// variable, fixed-order Gauss-Legendre in the angle.
double ball_integral_ts(double r, int d, double alpha) {
  if (d == 1) {
    // Symmetrized integrand (f(w) + f(-w)) / 2 over the full interval (-1,1):
    // same integral, but even in w, which keeps the two tanh-sinh tails equal.
    return tanh_sinh([&](double w, double wm, double wp) {
      const double one_minus_w2 = wm * wp;
      return std::pow(one_minus_w2, -0.5 * alpha) *
             (std::pow(r - w, alpha - 1.0) + std::pow(r + w, alpha - 1.0)) * 0.5;
    });
  }
  const double ring = sphere_area(d - 2);
  return ring * tanh_sinh_01([&](double rho, double rho_m) {
    const double one_minus_rho2 = rho_m * (1.0 + rho);
    return std::pow(rho, d - 1) * std::pow(one_minus_rho2, -0.5 * alpha) *
           angular_factor_gl(r, rho, d, alpha);
  });
}

}  // namespace

double capacity_unit_ball(int d, double alpha) {
  const double dd = require_transient(d, alpha);
  return std::exp(std::lgamma(dd / 2.0) - std::lgamma(alpha / 2.0) -
                  std::lgamma(1.0 + (dd - alpha) / 2.0));
}

double riesz_constant(int d, double alpha) {
  const double dd = require_transient(d, alpha);
  return std::exp(std::lgamma((dd - alpha) / 2.0) - alpha * std::log(2.0) -
                  (dd / 2.0) * std::log(kPi) - std::lgamma(alpha / 2.0));
}

double capacity_unit_ball_green(int d, double alpha) {
  return capacity_unit_ball(d, alpha) / riesz_constant(d, alpha);
}

double green_function_radial(double r, int d, double alpha) {
  require_transient(d, alpha);
  if (!(r > 0.0))
    throw std::domain_error("Green function requires |x| > 0");
  return riesz_constant(d, alpha) * std::pow(r, alpha - static_cast<double>(d));
}

double green_function(const std::vector<double>& x, const PotentialContext& ctx) {
  ctx.validate();
  if (x.size() != static_cast<std::size_t>(ctx.params.d))
    throw std::domain_error("point dimension mismatch");
  double r2 = 0.0;
  for (double c : x) r2 += c * c;
  return green_function_radial(std::sqrt(r2), ctx.params.d, ctx.params.alpha);
}

double phi_radial(double r, const PotentialContext& ctx) {
  ctx.validate();
  const int d = ctx.params.d;
  const double alpha = ctx.params.alpha;
  if (alpha == 2.0)
    throw std::domain_error("alpha = 2 is the Brownian case; use phi_brownian");
  if (!(r >= 0.0)) throw std::domain_error("radius must be non-negative");
  if (r <= 1.0) return 1.0;
  const double c = phi_constant(d, alpha);
  const double tol_raw = std::max(ctx.quadrature_tolerance, 1e-12) / c;
  return c * ball_integral_gk(r, d, alpha, tol_raw);
}

double phi(const std::vector<double>& y, const PotentialContext& ctx) {
  ctx.validate();
  if (y.size() != static_cast<std::size_t>(ctx.params.d))
    throw std::domain_error("point dimension mismatch");
  double r2 = 0.0;
  for (double c : y) r2 += c * c;
  return phi_radial(std::sqrt(r2), ctx);
}

double phi_brownian_radial(double r, int d) {
  if (d < 3) throw std::domain_error("Brownian hitting formula requires d >= 3");
  if (!(r >= 0.0)) throw std::domain_error("radius must be non-negative");
  if (r <= 1.0) return 1.0;
  return std::pow(r, 2.0 - static_cast<double>(d));
}

double phi_brownian(const std::vector<double>& y, int d) {
  if (y.size() != static_cast<std::size_t>(d))
    throw std::domain_error("point dimension mismatch");
  double r2 = 0.0;
  for (double c : y) r2 += c * c;
  return phi_brownian_radial(std::sqrt(r2), d);
}

double h_function(double t, int d, double alpha) {
  if (d < 1 || !(alpha > 0.0) || alpha > 2.0)
    throw std::domain_error("invalid (d, alpha)");
  if (!(t >= 0.0)) throw std::domain_error("time must be non-negative");
  const double ratio = static_cast<double>(d) / alpha;
  if (ratio <= 1.0)
    throw std::domain_error("variance scale requires d/alpha > 1");
  if (std::abs(ratio - 2.0) <= 1e-12) return std::log(t + std::numbers::e);
  if (ratio > 2.0) return 1.0;
  return std::pow(t, 2.0 - ratio);
}

double lil_normalizer_limsup(double t, double sigma) {
  if (!(sigma > 0.0)) throw std::domain_error("sigma must be positive");
  if (!(t >= kLogLogThreshold))
    throw std::domain_error("normalizer requires t >= exp(e)");
  return std::sqrt(2.0 * sigma * sigma * t * std::log(std::log(t)));
}

double lil_normalizer_liminf(double t, double sigma) {
  if (!(sigma > 0.0)) throw std::domain_error("sigma must be positive");
  if (!(t >= kLogLogThreshold))
    throw std::domain_error("normalizer requires t >= exp(e)");
  return sigma * std::sqrt(t / std::log(std::log(t)));
}

double equilibrium_mass(int d, double alpha) {
  require_transient(d, alpha);
  if (d == 1) {
    return 2.0 * tanh_sinh_01([&](double w, double wm) {
      return std::pow(wm * (1.0 + w), -0.5 * alpha);
    });
  }
  return sphere_area(d - 1) * tanh_sinh_01([&](double rho, double rho_m) {
    return std::pow(rho, d - 1) *
           std::pow(rho_m * (1.0 + rho), -0.5 * alpha);
  });
}

double green_equilibrium_convolution(double r, const PotentialContext& ctx) {
  ctx.validate();
  const int d = ctx.params.d;
  const double alpha = ctx.params.alpha;
  if (alpha == 2.0)
    throw std::domain_error("alpha = 2 is the Brownian case; use phi_brownian");
  if (!(r > 1.0))
    throw std::domain_error("convolution route is defined off the ball, |y| > 1");
  const double mass = equilibrium_mass(d, alpha);
  const double density_scale = capacity_unit_ball_green(d, alpha) / mass;
  return riesz_constant(d, alpha) * density_scale * ball_integral_ts(r, d, alpha);
}

}  // namespace sausage
