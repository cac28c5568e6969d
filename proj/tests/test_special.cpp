#include <catch_amalgamated.hpp>

#include <cmath>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "trawl/autodiff.hpp"
#include "trawl/special.hpp"

using namespace trawl;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("incomplete gamma agrees with boost", "[special]") {
  for (double a : {0.05, 0.5, 1.0, 2.5, 12.0, 150.0}) {
    for (double x : {1e-3, 0.1, 0.9, 2.0, 10.0, 40.0, 200.0}) {
      const double ref = boost::math::gamma_p(a, x);
      CHECK_THAT(gamma_p(a, x), WithinAbs(ref, 1e-14));
      CHECK_THAT(gamma_q(a, x), WithinAbs(boost::math::gamma_q(a, x), 1e-14));
    }
  }
}

TEST_CASE("inverse incomplete gamma round trips", "[special]") {
  for (double a : {0.03, 0.4, 1.0, 3.0, 50.0}) {
    for (double p : {1e-8, 0.01, 0.3, 0.5, 0.77, 0.999, 1 - 1e-9}) {
      const double x = gamma_p_inv(a, p);
      CHECK_THAT(gamma_p(a, x), WithinAbs(p, 1e-12));
      CHECK_THAT(x, WithinRel(boost::math::gamma_p_inv(a, p), 1e-9));
    }
  }
}

TEST_CASE("incomplete beta agrees with boost", "[special]") {
  for (double a : {0.02, 0.3, 1.0, 2.0, 7.5, 300.0}) {
    for (double b : {0.05, 0.7, 1.0, 4.0, 90.0}) {
      for (double x : {1e-6, 0.01, 0.2, 0.5, 0.8, 0.999}) {
        INFO("a=" << a << " b=" << b << " x=" << x);
        CHECK_THAT(inc_beta(a, b, x), WithinAbs(boost::math::ibeta(a, b, x), 2e-14));
      }
    }
  }
}

TEST_CASE("inverse incomplete beta round trips", "[special]") {
  for (double a : {0.05, 0.6, 1.0, 3.0, 40.0}) {
    for (double b : {0.1, 1.0, 2.2, 25.0}) {
      for (double p : {1e-6, 0.05, 0.5, 0.9, 0.99999}) {
        INFO("a=" << a << " b=" << b << " p=" << p);
        const double x = inc_beta_inv(a, b, p);
        const double ref = boost::math::ibeta_inv(a, b, p);
        CHECK_THAT(x, WithinRel(ref, 1e-10));
        CHECK_THAT(1.0 - x, WithinRel(1.0 - ref, 1e-6) || WithinAbs(1.0 - ref, 1e-15));
      }
    }
  }
}

TEST_CASE("shape derivatives match finite differences of boost", "[special]") {
  for (double a : {0.2, 1.3, 6.0}) {
    for (double x : {0.05, 1.0, 4.0, 15.0}) {
      double v, da;
      gamma_p_with_shape_derivative(a, x, v, da);
      const double h = 1e-5 * a;
      const double fd = (boost::math::gamma_p(a + h, x) - boost::math::gamma_p(a - h, x)) / (2 * h);
      CHECK_THAT(v, WithinAbs(boost::math::gamma_p(a, x), 1e-14));
      CHECK_THAT(da, WithinAbs(fd, 1e-8));
    }
  }
  for (double a : {0.3, 2.0, 9.0}) {
    for (double b : {0.4, 1.5, 20.0}) {
      for (double x : {0.02, 0.3, 0.7, 0.97}) {
        double v, da, db;
        inc_beta_with_shape_derivatives(a, b, x, v, da, db);
        const double ha = 1e-5 * a, hb = 1e-5 * b;
        const double fa = (boost::math::ibeta(a + ha, b, x) - boost::math::ibeta(a - ha, b, x)) / (2 * ha);
        const double fb = (boost::math::ibeta(a, b + hb, x) - boost::math::ibeta(a, b - hb, x)) / (2 * hb);
        CHECK_THAT(da, WithinAbs(fa, 1e-7));
        CHECK_THAT(db, WithinAbs(fb, 1e-7));
      }
    }
  }
}

TEST_CASE("modified Bessel I agrees with boost on both sides of the switch", "[special]") {
  for (double nu : {0.0, 1.0, 2.5, 7.0, 30.0}) {
    for (double z : {0.01, 0.5, 3.0, 14.9, 15.1, 25.0, 80.0, 400.0}) {
      const double ref = std::log(boost::math::cyl_bessel_i(nu, z));
      if (!std::isfinite(ref)) continue;
      CHECK_THAT(log_bessel_i(nu, z), WithinRel(ref, 1e-10) || WithinAbs(ref, 1e-12));
    }
  }
  CHECK_THAT(log_bessel_i_dz(2.0, 3.0),
             WithinRel(0.5 * (boost::math::cyl_bessel_i(1.0, 3.0) + boost::math::cyl_bessel_i(3.0, 3.0)) /
                           boost::math::cyl_bessel_i(2.0, 3.0),
                       1e-10));
}

TEST_CASE("modified Bessel K agrees with boost", "[special]") {
  for (int n : {0, 1, 3}) {
    for (double z : {1e-3, 0.3, 1.999, 2.001, 7.0, 15.0, 60.0, 500.0}) {
      const double ref = boost::math::cyl_bessel_k(n, z);
      if (ref == 0.0) continue;
      CHECK_THAT(bessel_k(n, z), WithinRel(ref, 1e-10));
    }
  }
  // exp(z) K_1(z) derivatives against finite differences
  for (double z : {0.7, 3.0, 20.0}) {
    double d[4];
    bessel_k1_scaled_derivatives(z, 3, d);
    const double h = 1e-4 * z;
    double lo[4], hi[4];
    bessel_k1_scaled_derivatives(z - h, 3, lo);
    bessel_k1_scaled_derivatives(z + h, 3, hi);
    for (int k = 0; k < 3; ++k) CHECK_THAT(d[k + 1], WithinRel((hi[k] - lo[k]) / (2 * h), 1e-6));
  }
}

TEST_CASE("normal functions", "[special]") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK_THAT(normal_quantile(0.975), WithinAbs(1.959963984540054, 1e-13));
  CHECK_THAT(normal_log_cdf(-40.0), WithinRel(-804.6084420137538, 1e-12));
  CHECK_THAT(normal_log_cdf(-3.0), WithinRel(std::log(normal_cdf(-3.0)), 1e-14));
}

TEST_CASE("jet arithmetic reproduces Taylor coefficients", "[autodiff]") {
  using J = Jet<double, 4>;
  const J t = J::variable(0.5);
  const J e = exp(t);
  for (int k = 0; k <= 4; ++k) {
    double fact = 1;
    for (int j = 2; j <= k; ++j) fact *= j;
    CHECK_THAT(e.c[k], WithinRel(std::exp(0.5) / fact, 1e-14));
  }
  const J l = log(t);  // log(0.5 + s) = log 0.5 + s/0.5 - s^2/(2*0.25) + ...
  CHECK_THAT(l.c[1], WithinRel(2.0, 1e-14));
  CHECK_THAT(l.c[2], WithinRel(-2.0, 1e-14));
  CHECK_THAT(l.c[3], WithinRel(8.0 / 3.0, 1e-14));
  const J p = pow(t, 2.5);  // d^2/ds^2 s^2.5 / 2 = 2.5*1.5*0.5^0.5/2
  CHECK_THAT(p.c[2], WithinRel(2.5 * 1.5 * std::sqrt(0.5) / 2.0, 1e-14));
  const J q = (t * t + 1.0) / t;  // 1/s + s
  CHECK_THAT(q.c[1], WithinRel(1.0 - 4.0, 1e-14));
}

TEST_CASE("dual numbers give partial derivatives", "[autodiff]") {
  using D = Dual<2>;
  const D x = D::variable(1.5, 0), y = D::variable(0.25, 1);
  const D f = pow(x, y) * lgamma(x) / (1.0 + y);
  const double h = 1e-6;
  auto F = [](double a, double b) { return std::pow(a, b) * std::lgamma(a) / (1.0 + b); };
  CHECK_THAT(f.d[0], WithinRel((F(1.5 + h, 0.25) - F(1.5 - h, 0.25)) / (2 * h), 1e-7));
  CHECK_THAT(f.d[1], WithinRel((F(1.5, 0.25 + h) - F(1.5, 0.25 - h)) / (2 * h), 1e-7));
}
