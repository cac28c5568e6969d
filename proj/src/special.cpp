#include "trawl/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/polygamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "trawl/error.hpp"
#include "trawl/incomplete.hpp"

namespace trawl {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = std::numbers::egamma;
}  // namespace

double digamma(double x) { return boost::math::digamma(x); }
double trigamma(double x) { return boost::math::trigamma(x); }
double polygamma(int n, double x) { return boost::math::polygamma(n, x); }
double log_beta(double a, double b) {
  if (a > b) std::swap(a, b);
  if (b < 10.0) return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  return std::lgamma(a) + std::log(boost::math::tgamma_delta_ratio(b, a));
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double log_erfc(double x) {
  if (x < 26.0) return std::log(std::erfc(x));
  const double t2 = 1.0 / (2.0 * x * x);
  const double series = 1.0 - t2 * (1.0 - 3.0 * t2 * (1.0 - 5.0 * t2 * (1.0 - 7.0 * t2)));
  return -x * x - std::log(x) - 0.5 * std::log(kPi) + std::log(series);
}

double normal_log_cdf(double x) {
  if (x > -5.0) return std::log(normal_cdf(x));
  return log_erfc(-x / std::numbers::sqrt2) - std::numbers::ln2;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0,1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double gamma_p(double a, double x) { return detail::gamma_p_t(a, x); }
double gamma_q(double a, double x) { return detail::gamma_q_t(a, x); }

void gamma_p_with_shape_derivative(double a, double x, double& p, double& dp_da) {
  const Dual<1> r = detail::gamma_p_t(Dual<1>::variable(a, 0), x);
  p = r.v;
  dp_da = r.d[0];
}

double gamma_p_inv(double a, double p) {
  if (!(a > 0.0)) throw DomainError("gamma_p_inv: shape must be positive");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("gamma_p_inv: p must lie in [0,1]");
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  const double a1 = a - 1.0;
  const double gln = std::lgamma(a);
  double x, lna1 = 0.0, afac = 0.0;
  if (a > 1.0) {
    lna1 = std::log(a1);
    afac = std::exp(a1 * (lna1 - 1.0) - gln);
    const double pp = p < 0.5 ? p : 1.0 - p;
    const double t = std::sqrt(-2.0 * std::log(pp));
    x = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
    if (p < 0.5) x = -x;
    x = std::max(1e-3, a * std::pow(1.0 - 1.0 / (9.0 * a) - x / (3.0 * std::sqrt(a)), 3));
  } else {
    const double t = 1.0 - a * (0.253 + a * 0.12);
    if (p < t)
      x = std::pow(p / t, 1.0 / a);
    else
      x = 1.0 - std::log(1.0 - (p - t) / (1.0 - t));
  }
  for (int j = 0; j < 100; ++j) {
    if (x <= 0.0) return 0.0;
    const double err = p < 0.5 ? gamma_p(a, x) - p : (1.0 - p) - gamma_q(a, x);
    double t;
    if (a > 1.0)
      t = afac * std::exp(-(x - a1) + a1 * (std::log(x) - lna1));
    else
      t = std::exp(-x + a1 * std::log(x) - gln);
    if (t == 0.0) break;
    const double u = err / t;
    t = u / (1.0 - 0.5 * std::min(1.0, u * ((a - 1.0) / x - 1.0)));
    x -= t;
    if (x <= 0.0) x = 0.5 * (x + t);
    if (std::fabs(t) < 1e-15 * x) break;
  }
  return x;
}

double inc_beta(double a, double b, double x) { return detail::inc_beta_t(a, b, x); }

void inc_beta_with_shape_derivatives(double a, double b, double x, double& v, double& da,
                                     double& db) {
  const Dual<2> r = detail::inc_beta_t(Dual<2>::variable(a, 0), Dual<2>::variable(b, 1), x);
  v = r.v;
  da = r.d[0];
  db = r.d[1];
}

double inc_beta_inv(double a, double b, double p) {
  if (!(a > 0.0 && b > 0.0)) throw DomainError("inc_beta_inv: shapes must be positive");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("inc_beta_inv: p must lie in [0,1]");
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  double x;
  if (a >= 1.0 && b >= 1.0) {
    const double pp = p < 0.5 ? p : 1.0 - p;
    const double t = std::sqrt(-2.0 * std::log(pp));
    x = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
    if (p < 0.5) x = -x;
    const double al = (x * x - 3.0) / 6.0;
    const double h = 2.0 / (1.0 / (2.0 * a - 1.0) + 1.0 / (2.0 * b - 1.0));
    const double w = x * std::sqrt(al + h) / h -
                     (1.0 / (2.0 * b - 1.0) - 1.0 / (2.0 * a - 1.0)) * (al + 5.0 / 6.0 - 2.0 / (3.0 * h));
    x = a / (a + b * std::exp(2.0 * w));
  } else {
    const double lna = std::log(a / (a + b));
    const double lnb = std::log(b / (a + b));
    const double t = std::exp(a * lna) / a;
    const double u = std::exp(b * lnb) / b;
    const double w = t + u;
    if (p < t / w)
      x = std::pow(a * w * p, 1.0 / a);
    else
      x = 1.0 - std::pow(b * w * (1.0 - p), 1.0 / b);
  }
  const double afac = -log_beta(a, b);
  // Bracket maintained for safeguarding the Halley steps.
  double lo = 0.0, hi = 1.0;
  for (int j = 0; j < 200; ++j) {
    if (x <= 0.0 || x >= 1.0) return x;
    const double err = inc_beta(a, b, x) - p;
    if (err < 0.0)
      lo = std::max(lo, x);
    else
      hi = std::min(hi, x);
    const double t = std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) + afac);
    double step;
    if (t == 0.0 || !std::isfinite(t)) {
      step = x - 0.5 * (lo + hi);
    } else {
      const double u = err / t;
      step = u / (1.0 - 0.5 * std::min(1.0, u * ((a - 1.0) / x - (b - 1.0) / (1.0 - x))));
    }
    double xn = x - step;
    if (!(xn > lo && xn < hi)) {
      xn = 0.5 * (lo + hi);
      step = x - xn;
    }
    x = xn;
    if (std::fabs(step) < 1e-15 * x || hi - lo < 4e-16 * x) break;
  }
  return x;
}

double log_bessel_i(double nu, double z) {
  if (nu < 0.0 || z < 0.0) throw DomainError("log_bessel_i: requires nu >= 0 and z >= 0");
  if (z == 0.0) return nu == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  if (z > 15.0) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0, sum = 1.0, prev = 1.0;
    bool ok = false;
    for (int k = 1; k < 200; ++k) {
      term *= -(mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (k * 8.0 * z);
      if (std::fabs(term) > std::fabs(prev)) break;
      sum += term;
      prev = term;
      if (std::fabs(term) < 1e-17 * std::fabs(sum)) {
        ok = true;
        break;
      }
    }
    if (ok && sum > 0.0) return z - 0.5 * std::log(2.0 * kPi * z) + std::log(sum);
  }
  // Power series normalized at its largest term.
  const double q = 0.25 * z * z;
  const double root = 0.5 * (-(nu + 2.0) + std::sqrt(nu * nu + 4.0 * q));
  const int kstar = root > 0.0 ? static_cast<int>(std::ceil(root)) : 0;
  const double log_peak = (2.0 * kstar + nu) * std::log(0.5 * z) - std::lgamma(kstar + 1.0) -
                          std::lgamma(kstar + nu + 1.0);
  double sum = 1.0, term = 1.0;
  for (int k = kstar;; ++k) {
    term *= q / ((k + 1.0) * (k + nu + 1.0));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  term = 1.0;
  for (int k = kstar - 1; k >= 0; --k) {
    term *= ((k + 1.0) * (k + nu + 1.0)) / q;
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return log_peak + std::log(sum);
}

double bessel_i(double nu, double z) { return std::exp(log_bessel_i(nu, z)); }

double log_bessel_i_dz(double nu, double z) {
  if (!(z > 0.0)) throw DomainError("log_bessel_i_dz: z must be positive");
  // I_nu' = I_{nu+1} + (nu/z) I_nu
  return std::exp(log_bessel_i(nu + 1.0, z) - log_bessel_i(nu, z)) + nu / z;
}

namespace {

// exp(z) K_0(z) and exp(z) K_1(z).
void bessel_k01_scaled(double z, double& k0, double& k1) {
  if (!(z > 0.0)) throw DomainError("bessel_k: argument must be positive");
  if (z <= 2.0) {
    const double q = 0.25 * z * z;
    const double lz = std::log(0.5 * z);
    double i0 = 0.0, i1s = 0.0, s0 = 0.0, s1 = 0.0;
    double t0 = 1.0;  // q^k/(k!)^2
    double t1 = 1.0;  // q^k/(k!(k+1)!)
    double harm = 0.0;
    for (int k = 0; k < 60; ++k) {
      if (k > 0) {
        t0 *= q / (double(k) * k);
        t1 *= q / (double(k) * (k + 1.0));
        harm += 1.0 / k;
      }
      i0 += t0;
      i1s += t1;
      s0 += harm * t0;
      // psi(k+1) + psi(k+2) = -2 gamma + 2 H_k + 1/(k+1)
      s1 += (-2.0 * kEulerGamma + 2.0 * harm + 1.0 / (k + 1.0)) * t1;
      if (t0 < 1e-18 && t1 < 1e-18) break;
    }
    const double i1 = 0.5 * z * i1s;
    const double kk0 = -(lz + kEulerGamma) * i0 + s0;
    const double kk1 = 1.0 / z + lz * i1 - 0.25 * z * s1;
    const double e = std::exp(z);
    k0 = kk0 * e;
    k1 = kk1 * e;
    return;
  }
  // Steed's method for the second continued fraction, nu = 0.
  double b = 2.0 * (1.0 + z);
  double d = 1.0 / b;
  double h = d, delh = d;
  double q1 = 0.0, q2 = 1.0;
  const double a1 = 0.25;
  double q = a1, c = a1, a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 1; i < 100000; ++i) {
    a -= 2 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::fabs(dels / s) < 1e-17) break;
  }
  h = a1 * h;
  k0 = std::sqrt(kPi / (2.0 * z)) / s;
  k1 = k0 * (z + 0.5 - h) / z;
}

}  // namespace

double bessel_k_scaled(int n, double z) {
  if (n < 0) n = -n;
  double k0, k1;
  bessel_k01_scaled(z, k0, k1);
  if (n == 0) return k0;
  double km = k0, k = k1;
  for (int j = 1; j < n; ++j) {
    const double kp = km + (2.0 * j / z) * k;
    km = k;
    k = kp;
  }
  return k;
}

double bessel_k(int n, double z) { return bessel_k_scaled(n, z) * std::exp(-z); }
double log_bessel_k(int n, double z) { return std::log(bessel_k_scaled(n, z)) - z; }

void bessel_k1_scaled_derivatives(double z, int order, double* out) {
  // scaled K_n for n = 0..order+1
  const int nmax = order + 1;
  double kn[64];
  if (nmax >= 63) throw DomainError("bessel_k1_scaled_derivatives: order too large");
  bessel_k01_scaled(z, kn[0], kn[1]);
  for (int j = 1; j < nmax; ++j) kn[j + 1] = kn[j - 1] + (2.0 * j / z) * kn[j];
  // e^z K_1^{(j)}(z) = (-1/2)^j sum_i C(j,i) k_{|1-j+2i|}
  double dk[64];
  for (int j = 0; j <= order; ++j) {
    double s = 0.0, binom = 1.0;
    for (int i = 0; i <= j; ++i) {
      s += binom * kn[std::abs(1 - j + 2 * i)];
      binom = binom * (j - i) / (i + 1.0);
    }
    dk[j] = std::pow(-0.5, j) * s;
  }
  // (e^z K_1)^{(k)} = sum_j C(k,j) e^z K_1^{(j)}
  for (int k = 0; k <= order; ++k) {
    double s = 0.0, binom = 1.0;
    for (int j = 0; j <= k; ++j) {
      s += binom * dk[j];
      binom = binom * (k - j) / (j + 1.0);
    }
    out[k] = s;
  }
}

}  // namespace trawl
