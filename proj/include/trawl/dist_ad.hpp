#pragma once

// Family formulas templated on the scalar type (double, Dual, Jet).

#include <cmath>
#include <numbers>

#include "trawl/autodiff.hpp"
#include "trawl/dist.hpp"
#include "trawl/error.hpp"
#include "trawl/special.hpp"

namespace trawl {

template <class S>
S log_bessel_i_t(double nu, const S& z) {
  if constexpr (std::is_same_v<S, double>) {
    return log_bessel_i(nu, z);
  } else if constexpr (is_dual<S>::value) {
    return chain(z, log_bessel_i(nu, z.v), log_bessel_i_dz(nu, z.v));
  } else {
    if (!z.is_constant()) throw UnsupportedError("log_bessel_i of a nonconstant jet");
    return S(log_bessel_i_t(nu, z.c[0]));
  }
}

template <class S>
S log_bessel_k1_t(const S& z) {
  using std::log;
  return log(apply(&bessel_k1_scaled_derivatives, z)) - z;
}

template <class S>
S abs_t(const S& x) {
  return value_of(x) < 0.0 ? -x : x;
}

// Log density (continuous) or log pmf (discrete) at x.
template <class S>
S log_density_t(Family f, const S* p, const S& x) {
  using std::exp;
  using std::lgamma;
  using std::log;
  using std::log1p;
  using std::sqrt;
  constexpr double kLogSqrt2Pi = 0.91893853320467274178;
  switch (f) {
    case Family::Poisson:
      return x * log(p[0]) - p[0] - lgamma(x + 1.0);
    case Family::NegBinomial:
      return lgamma(x + p[0]) - lgamma(p[0]) - lgamma(x + 1.0) + p[0] * log1p(-p[1]) +
             (value_of(x) == 0.0 ? S(0.0) : x * log(p[1]));
    case Family::Skellam: {
      const double k = value_of(x);
      return -(p[0] + p[1]) + 0.5 * x * (log(p[0]) - log(p[1])) +
             log_bessel_i_t(std::fabs(k), 2.0 * sqrt(p[0] * p[1]));
    }
    case Family::Uniform:
      return -log(p[1] - p[0]) + 0.0 * x;
    case Family::Beta:
      return (p[0] - 1.0) * log(x) + (p[1] - 1.0) * log1p(-x) - lgamma(p[0]) - lgamma(p[1]) +
             lgamma(p[0] + p[1]);
    case Family::Gamma:
      return p[0] * log(p[1]) - lgamma(p[0]) + (p[0] - 1.0) * log(x) - p[1] * x;
    case Family::InvGaussian: {
      const S dx = x - p[0];
      return 0.5 * (log(p[1]) - 3.0 * log(x)) - kLogSqrt2Pi - p[1] * dx * dx / (2.0 * p[0] * p[0] * x);
    }
    case Family::Gaussian: {
      const S w = (x - p[0]) / p[1];
      return -kLogSqrt2Pi - log(p[1]) - 0.5 * w * w;
    }
    case Family::DSMaxwell: {
      const S w = (x - p[0]) / p[1];
      return -kLogSqrt2Pi - log(p[1]) + 2.0 * log(abs_t(w)) - 0.5 * w * w;
    }
    case Family::NIG: {
      const S& al = p[0];
      const S& be = p[1];
      const S& de = p[2];
      const S dx = x - p[3];
      const S r = sqrt(de * de + dx * dx);
      const S ga = sqrt(al * al - be * be);
      return log(al) + log(de) - std::log(std::numbers::pi) + log_bessel_k1_t(al * r) - log(r) + de * ga +
             be * dx;
    }
  }
  throw ConsistencyError("log_density_t: unknown family");
}

// Parameters of the law of L(A) given Leb(A) = leb.
template <class S>
void basis_scale_t(Family f, const S* p, const S& leb, S* out) {
  using std::sqrt;
  switch (f) {
    case Family::Poisson:
      out[0] = p[0] * leb;
      return;
    case Family::NegBinomial:
      out[0] = p[0] * leb;
      out[1] = p[1];
      return;
    case Family::Skellam:
      out[0] = p[0] * leb;
      out[1] = p[1] * leb;
      return;
    case Family::Gamma:
      out[0] = p[0] * leb;
      out[1] = p[1];
      return;
    case Family::InvGaussian:
      out[0] = p[0] * leb;
      out[1] = p[1] * leb * leb;
      return;
    case Family::Gaussian:
      out[0] = p[0] * leb;
      out[1] = p[1] * sqrt(leb);
      return;
    case Family::NIG:
      out[0] = p[0];
      out[1] = p[1];
      out[2] = p[2] * leb;
      out[3] = p[3] * leb;
      return;
    default:
      throw UnsupportedError("basis_scale: family " + family_name(f) +
                             " is not closed under Levy-basis scaling");
  }
}

// Cumulants kappa_1..kappa_n (n <= 6) of the cumulant families.
template <class S>
void cumulants_t(Family f, const S* p, int n, S* kappa) {
  using std::pow;
  using std::sqrt;
  if (n > 6) throw UnsupportedError("cumulants: order above 6");
  switch (f) {
    case Family::Poisson:
      for (int k = 0; k < n; ++k) kappa[k] = p[0];
      return;
    case Family::Skellam:
      for (int k = 0; k < n; ++k) kappa[k] = (k % 2 == 0) ? p[0] - p[1] : p[0] + p[1];
      return;
    case Family::Gamma: {
      double fact = 1.0;
      S bp = p[1];
      for (int k = 0; k < n; ++k) {
        if (k > 0) {
          fact *= k;
          bp = bp * p[1];
        }
        kappa[k] = p[0] * fact / bp;
      }
      return;
    }
    case Family::InvGaussian: {
      // kappa_k = (2k-3)!! mu^(2k-1) / lambda^(k-1)
      double dfact = 1.0;
      for (int k = 1; k <= n; ++k) {
        if (k >= 3) dfact *= (2.0 * k - 3.0);
        kappa[k - 1] = dfact * pow(p[0], 2.0 * k - 1.0) / pow(p[1], double(k - 1));
      }
      return;
    }
    case Family::Gaussian:
      for (int k = 0; k < n; ++k) kappa[k] = S(0.0);
      kappa[0] = p[0];
      if (n > 1) kappa[1] = p[1] * p[1];
      return;
    case Family::NegBinomial: {
      // kappa_k = m P_k(q), q = p/(1-p), P_1 = q, P_{k+1} = P_k'(q) q (1+q)
      const S q = p[1] / (1.0 - p[1]);
      double coef[8] = {0, 1, 0, 0, 0, 0, 0, 0};
      for (int k = 1; k <= n; ++k) {
        S val = S(0.0);
        S qp = S(1.0);
        for (int j = 0; j <= k; ++j) {
          val = val + coef[j] * qp;
          qp = qp * q;
        }
        kappa[k - 1] = p[0] * val;
        double next[8] = {0, 0, 0, 0, 0, 0, 0, 0};
        for (int j = 1; j <= k; ++j) {
          next[j] += j * coef[j];
          next[j + 1] += j * coef[j];
        }
        for (int j = 0; j < 8; ++j) coef[j] = next[j];
      }
      return;
    }
    case Family::NIG: {
      const S& al = p[0];
      const S& be = p[1];
      const S& de = p[2];
      const S ga = sqrt(al * al - be * be);
      kappa[0] = p[3] + de * be / ga;
      if (n == 1) return;
      Jet<S, 6> u = Jet<S, 6>::variable(be);
      Jet<S, 6> g = sqrt(al * al - u * u);
      double fact = 1.0;
      for (int k = 2; k <= n; ++k) {
        fact *= k;
        kappa[k - 1] = -de * fact * g.c[k];
      }
      return;
    }
    default:
      throw UnsupportedError("cumulants: not available for " + family_name(f));
  }
}

// Raw moment E[Z^l].
template <class S>
S raw_moment_t(Family f, const S* p, int l) {
  using std::pow;
  if (l < 0) throw DomainError("raw_moment: negative order");
  if (l == 0) return S(1.0);
  switch (f) {
    case Family::Beta: {
      S m = S(1.0);
      for (int r = 0; r < l; ++r) m = m * (p[0] + double(r)) / (p[0] + p[1] + double(r));
      return m;
    }
    case Family::Uniform:
      return (pow(p[1], double(l + 1)) - pow(p[0], double(l + 1))) / (double(l + 1) * (p[1] - p[0]));
    case Family::DSMaxwell: {
      // E[Y^k] = E_N[Y^{k+2}] / sigma^2 with Y = Z - mu, only even k nonzero.
      S total = S(0.0);
      double binom = 1.0;
      for (int k = 0; k <= l; ++k) {
        if (k % 2 == 0) {
          double dfact = 1.0;
          for (int j = k + 1; j > 1; j -= 2) dfact *= j;
          const S ey = dfact * pow(p[1], double(k));
          total = total + binom * ey * pow(p[0], double(l - k));
        }
        binom = binom * (l - k) / (k + 1.0);
      }
      return total;
    }
    case Family::Gaussian: {
      S m0 = S(1.0), m1 = p[0];
      for (int k = 2; k <= l; ++k) {
        const S m2 = p[0] * m1 + double(k - 1) * p[1] * p[1] * m0;
        m0 = m1;
        m1 = m2;
      }
      return m1;
    }
    default: {
      S kappa[6];
      cumulants_t(f, p, l, kappa);
      S m[7];
      m[0] = S(1.0);
      for (int nn = 1; nn <= l; ++nn) {
        S s = S(0.0);
        double binom = 1.0;  // C(nn-1, k-1)
        for (int k = 1; k <= nn; ++k) {
          s = s + binom * kappa[k - 1] * m[nn - k];
          binom = binom * (nn - k) / double(k);
        }
        m[nn] = s;
      }
      return m[l];
    }
  }
}

}  // namespace trawl
