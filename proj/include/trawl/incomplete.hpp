#pragma once

// Regularized incomplete gamma and beta functions, templated on the type of
// the shape parameters so that Dual shapes yield shape derivatives.

#include <cmath>
#include <limits>

#include "trawl/autodiff.hpp"
#include "trawl/error.hpp"

namespace trawl::detail {

inline constexpr int kIncMaxIter = 200000;
inline constexpr double kIncEps = 3e-16;
inline constexpr double kIncDerivEps = 1e-14;
inline constexpr double kFpMin = 1e-300;

inline bool ratio_converged(double del) { return std::fabs(del - 1.0) < kIncEps; }
template <int N>
inline bool ratio_converged(const Dual<N>& del) {
  if (std::fabs(del.v - 1.0) >= kIncEps) return false;
  for (int i = 0; i < N; ++i)
    if (std::fabs(del.d[i]) >= kIncDerivEps) return false;
  return true;
}

inline bool term_small(double del, double sum) { return std::fabs(del) < std::fabs(sum) * kIncEps; }
template <int N>
inline bool term_small(const Dual<N>& del, const Dual<N>& sum) {
  if (std::fabs(del.v) >= std::fabs(sum.v) * kIncEps) return false;
  for (int i = 0; i < N; ++i)
    if (std::fabs(del.d[i]) >= (std::fabs(sum.d[i]) + std::fabs(sum.v)) * kIncDerivEps) return false;
  return true;
}

template <class S>
inline S clamp_tiny(const S& x) {
  return std::fabs(value_of(x)) < kFpMin ? S(kFpMin) : x;
}

template <class S>
S gamma_p_series(const S& a, double x) {
  using std::exp;
  using std::log;
  using std::lgamma;
  S ap = a;
  S del = 1.0 / a;
  S sum = del;
  for (int n = 0; n < kIncMaxIter; ++n) {
    ap = ap + 1.0;
    del = del * (x / ap);
    sum = sum + del;
    if (term_small(del, sum)) return sum * exp(-x + a * std::log(x) - lgamma(a));
  }
  throw ConvergenceError("incomplete gamma series did not converge");
}

template <class S>
S gamma_q_fraction(const S& a, double x) {
  using std::exp;
  using std::lgamma;
  S b = (x + 1.0) - a;
  S c = S(1.0 / kFpMin);
  S d = 1.0 / b;
  S h = d;
  for (int i = 1; i < kIncMaxIter; ++i) {
    const S an = -double(i) * (double(i) - a);
    b = b + 2.0;
    d = clamp_tiny(an * d + b);
    c = clamp_tiny(b + an / c);
    d = 1.0 / d;
    const S del = d * c;
    h = h * del;
    if (ratio_converged(del)) return exp(-x + a * std::log(x) - lgamma(a)) * h;
  }
  throw ConvergenceError("incomplete gamma continued fraction did not converge");
}

template <class S>
S gamma_p_t(const S& a, double x) {
  if (value_of(a) <= 0.0) throw DomainError("incomplete gamma: shape must be positive");
  if (x <= 0.0) return S(0.0);
  if (x < value_of(a) + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_fraction(a, x);
}

template <class S>
S gamma_q_t(const S& a, double x) {
  if (value_of(a) <= 0.0) throw DomainError("incomplete gamma: shape must be positive");
  if (x <= 0.0) return S(1.0);
  if (x < value_of(a) + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_fraction(a, x);
}

template <class S>
S beta_fraction(const S& a, const S& b, double x) {
  const S qab = a + b;
  const S qap = a + 1.0;
  const S qam = a - 1.0;
  S c = S(1.0);
  S d = clamp_tiny(1.0 - qab * x / qap);
  d = 1.0 / d;
  S h = d;
  for (int m = 1; m < kIncMaxIter; ++m) {
    const double m2 = 2.0 * m;
    S aa = double(m) * (b - double(m)) * x / ((qam + m2) * (a + m2));
    d = clamp_tiny(1.0 + aa * d);
    c = clamp_tiny(1.0 + aa / c);
    d = 1.0 / d;
    h = h * d * c;
    aa = -(a + double(m)) * (qab + double(m)) * x / ((a + m2) * (qap + m2));
    d = clamp_tiny(1.0 + aa * d);
    c = clamp_tiny(1.0 + aa / c);
    d = 1.0 / d;
    const S del = d * c;
    h = h * del;
    if (ratio_converged(del)) return h;
  }
  throw ConvergenceError("incomplete beta continued fraction did not converge");
}

template <class S>
S inc_beta_t(const S& a, const S& b, double x) {
  using std::exp;
  using std::lgamma;
  if (value_of(a) <= 0.0 || value_of(b) <= 0.0)
    throw DomainError("incomplete beta: shapes must be positive");
  if (x <= 0.0) return S(0.0);
  if (x >= 1.0) return S(1.0);
  const double av = value_of(a), bv = value_of(b);
  S lbt = lgamma(a + b) - lgamma(a) - lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double lbt_v = -log_beta(av, bv) + av * std::log(x) + bv * std::log1p(-x);
  if constexpr (std::is_same_v<S, double>)
    lbt = lbt_v;
  else
    lbt.v = lbt_v;
  if (x < (av + 1.0) / (av + bv + 2.0)) return exp(lbt) * beta_fraction(a, b, x) / a;
  return 1.0 - exp(lbt) * beta_fraction(b, a, 1.0 - x) / b;
}

}  // namespace trawl::detail
