#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "sausage/potential.hpp"

using namespace sausage;

// Reference values below were produced with an independent high-precision
// implementation (mpmath at 50 digits) and rounded to 17 significant digits.

namespace {

PotentialContext make_context(int d, double alpha) {
  PotentialContext ctx;
  ctx.params.d = d;
  ctx.params.alpha = alpha;
  return ctx;
}

}  // namespace

TEST_CASE("unit-ball Riesz capacity closed form") {
  CHECK(capacity_unit_ball(3, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(capacity_unit_ball(1, 0.6) ==
        doctest::Approx(0.64528773435115006).epsilon(1e-14));
  CHECK(capacity_unit_ball(3, 1.5) ==
        doctest::Approx(0.78689373267739748).epsilon(1e-14));
  CHECK(capacity_unit_ball(2, 1.0) ==
        doctest::Approx(0.63661977236758134).epsilon(1e-14));
  CHECK_THROWS_AS(capacity_unit_ball(1, 1.5), std::domain_error);  // recurrent
  CHECK_THROWS_AS(capacity_unit_ball(2, 2.0), std::domain_error);
}

TEST_CASE("Riesz-to-Green kernel constant") {
  CHECK(riesz_constant(3, 2.0) ==
        doctest::Approx(0.079577471545947668).epsilon(1e-14));
  CHECK(riesz_constant(3, 1.5) ==
        doctest::Approx(0.06349363593424097).epsilon(1e-14));
  CHECK(riesz_constant(1, 0.6) ==
        doctest::Approx(0.571216247620264).epsilon(1e-14));
  CHECK(riesz_constant(2, 1.0) ==
        doctest::Approx(0.15915494309189534).epsilon(1e-14));
}

TEST_CASE("Green-normalized capacity (sausage growth rate)") {
  CHECK(capacity_unit_ball_green(1, 0.6) ==
        doctest::Approx(1.1296732840486843).epsilon(1e-14));
  CHECK(capacity_unit_ball_green(3, 1.5) ==
        doctest::Approx(12.393269358402578).epsilon(1e-14));
  CHECK(capacity_unit_ball_green(2, 1.0) ==
        doctest::Approx(4.0).epsilon(1e-14));
  // alpha = 2: 4*pi in R^3, 4*pi^2 in R^4.
  CHECK(capacity_unit_ball_green(3, 2.0) ==
        doctest::Approx(12.566370614359173).epsilon(1e-14));
  CHECK(capacity_unit_ball_green(4, 2.0) ==
        doctest::Approx(39.478417604357434).epsilon(1e-14));
}

TEST_CASE("radial Green function") {
  // Brownian case in R^3: G(x) = 1/(4 pi |x|).
  CHECK(green_function_radial(2.0, 3, 2.0) ==
        doctest::Approx(0.039788735772973834).epsilon(1e-14));
  CHECK(green_function_radial(1.0, 3, 2.0) ==
        doctest::Approx(0.079577471545947668).epsilon(1e-14));
  CHECK_THROWS_AS(green_function_radial(0.0, 3, 2.0), std::domain_error);
  CHECK_THROWS_AS(green_function_radial(1.0, 1, 1.5), std::domain_error);

  const PotentialContext ctx = make_context(3, 2.0);
  const std::vector<double> x{0.0, 0.0, 2.0};
  CHECK(green_function(x, ctx) ==
        doctest::Approx(green_function_radial(2.0, 3, 2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(green_function({1.0, 0.0}, ctx), std::domain_error);
}

TEST_CASE("hitting probability of the unit ball, d=3 alpha=1.5") {
  const PotentialContext ctx = make_context(3, 1.5);
  struct Row {
    double r, value;
  };
  const std::vector<Row> table{
      {1.1, 0.78417646528907},  {1.5, 0.45358391593971},
      {2.0, 0.2865236950444},   {3.0, 0.15332551588328},
      {4.0, 0.099037348470905}, {5.0, 0.070688458999391},
  };
  for (const auto& row : table) {
    CHECK(phi_radial(row.r, ctx) == doctest::Approx(row.value).epsilon(5e-7));
  }
}

TEST_CASE("hitting probability of the unit ball, d=1 alpha=0.6") {
  const PotentialContext ctx = make_context(1, 0.6);
  CHECK(phi_radial(1.5, ctx) ==
        doctest::Approx(0.58537303517473).epsilon(5e-7));
  CHECK(phi_radial(2.0, ctx) ==
        doctest::Approx(0.50526500336956).epsilon(5e-7));
  CHECK(phi_radial(5.0, ctx) ==
        doctest::Approx(0.34058519410456).epsilon(5e-7));
}

TEST_CASE("hitting probability of the unit ball, d=2 alpha=1") {
  const PotentialContext ctx = make_context(2, 1.0);
  // r=2 admits the exact value 1/3 for the planar Cauchy process.
  CHECK(phi_radial(2.0, ctx) == doctest::Approx(1.0 / 3.0).epsilon(5e-7));
  CHECK(phi_radial(1.5, ctx) ==
        doctest::Approx(0.46455905439754).epsilon(5e-7));
  CHECK(phi_radial(5.0, ctx) ==
        doctest::Approx(0.12818843369795).epsilon(5e-7));
}

TEST_CASE("hitting probability boundary and domain behavior") {
  const PotentialContext ctx = make_context(3, 1.5);
  CHECK(phi_radial(1.0, ctx) == doctest::Approx(1.0));
  CHECK(phi_radial(0.25, ctx) == doctest::Approx(1.0));
  CHECK_THROWS_AS(phi_radial(2.0, make_context(3, 2.0)), std::domain_error);
  CHECK_THROWS_AS(phi_radial(2.0, make_context(1, 1.5)), std::domain_error);
  const std::vector<double> y{0.0, 2.0};
  CHECK(phi(y, make_context(2, 1.0)) ==
        doctest::Approx(1.0 / 3.0).epsilon(5e-7));
  CHECK_THROWS_AS(phi({1.0, 2.0, 3.0}, make_context(2, 1.0)),
                  std::domain_error);
}

TEST_CASE("Brownian hitting probability closed form") {
  CHECK(phi_brownian_radial(2.0, 3) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(phi_brownian_radial(0.5, 3) == doctest::Approx(1.0));
  CHECK(phi_brownian_radial(2.0, 4) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK_THROWS_AS(phi_brownian_radial(2.0, 2), std::domain_error);
  CHECK(phi_brownian({0.0, 0.0, 2.0}, 3) == doctest::Approx(0.5));
}

TEST_CASE("variance scale h across regimes") {
  // d/alpha > 2: constant.
  CHECK(h_function(100.0, 3, 1.0) == doctest::Approx(1.0));
  // d/alpha == 2: logarithmic, shifted so h > 0 for all t >= 0.
  CHECK(h_function(100.0, 2, 1.0) ==
        doctest::Approx(4.6319901130538899).epsilon(1e-14));
  CHECK(h_function(100.0, 4, 2.0) ==
        doctest::Approx(4.6319901130538899).epsilon(1e-14));
  // 1 < d/alpha < 2: polynomial correction t^{2 - d/alpha}.
  CHECK(h_function(100.0, 3, 5.0 / 3.0) ==
        doctest::Approx(2.5118864315095801).epsilon(1e-14));  // 100^0.2
  CHECK(h_function(100.0, 3, 2.0) == doctest::Approx(10.0).epsilon(1e-14));
  CHECK_THROWS_AS(h_function(100.0, 1, 1.0), std::domain_error);  // ratio 1
  CHECK_THROWS_AS(h_function(100.0, 1, 1.5), std::domain_error);  // ratio < 1
  CHECK_THROWS_AS(h_function(-1.0, 3, 1.0), std::domain_error);
}

TEST_CASE("iterated-logarithm envelope normalizers") {
  const double t = kLogLogThreshold;  // e^e, the smallest admissible time
  CHECK(t == doctest::Approx(15.154262241479264).epsilon(1e-14));
  CHECK(lil_normalizer_limsup(t, 1.0) ==
        doctest::Approx(5.5053178366883168).epsilon(1e-14));
  CHECK(lil_normalizer_liminf(t, 1.0) ==
        doctest::Approx(3.8928475749095628).epsilon(1e-14));
  CHECK(lil_normalizer_limsup(t, 2.0) ==
        doctest::Approx(2.0 * 5.5053178366883168).epsilon(1e-14));
  CHECK(lil_normalizer_liminf(t, 3.0) ==
        doctest::Approx(3.0 * 3.8928475749095628).epsilon(1e-14));
  CHECK_THROWS_AS(lil_normalizer_limsup(10.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(lil_normalizer_liminf(t, 0.0), std::domain_error);
  CHECK(kChungConstant == doctest::Approx(1.1107207345395916).epsilon(1e-14));
}

TEST_CASE("equilibrium measure total mass") {
  CHECK(equilibrium_mass(3, 1.5) ==
        doctest::Approx(21.966497999609984).epsilon(1e-9));
  CHECK(equilibrium_mass(1, 0.6) ==
        doctest::Approx(2.5057955763406788).epsilon(1e-9));
  CHECK(equilibrium_mass(2, 1.0) ==
        doctest::Approx(6.2831853071795865).epsilon(1e-9));
  CHECK_THROWS_AS(equilibrium_mass(1, 1.5), std::domain_error);
}

TEST_CASE("Green potential of the equilibrium measure matches the hitting probability") {
  // The direct hitting-probability route (adaptive Gauss-Kronrod) and the
  // Green-kernel convolution route (tanh-sinh) are independent computations
  // of the same function and must agree closely.
  {
    const PotentialContext ctx = make_context(3, 1.5);
    for (double r : {1.1, 1.5, 2.0, 5.0}) {
      CHECK(green_equilibrium_convolution(r, ctx) ==
            doctest::Approx(phi_radial(r, ctx)).epsilon(1e-6));
    }
  }
  {
    const PotentialContext ctx = make_context(1, 0.6);
    for (double r : {1.5, 2.0, 5.0}) {
      CHECK(green_equilibrium_convolution(r, ctx) ==
            doctest::Approx(phi_radial(r, ctx)).epsilon(1e-6));
    }
  }
  {
    const PotentialContext ctx = make_context(2, 1.0);
    CHECK(green_equilibrium_convolution(2.0, ctx) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-6));
  }
  CHECK_THROWS_AS(green_equilibrium_convolution(0.5, make_context(3, 1.5)),
                  std::domain_error);
}

TEST_CASE("potential context validation") {
  CHECK_NOTHROW(make_context(3, 1.5).validate());
  CHECK_THROWS_AS(make_context(1, 1.5).validate(), std::domain_error);
  CHECK_THROWS_AS(make_context(0, 1.0).validate(), std::domain_error);
}
