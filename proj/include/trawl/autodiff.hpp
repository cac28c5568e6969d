#pragma once

// Forward-mode dual numbers and truncated Taylor series (jets).
// Dual<N> carries a value and N partial derivatives. Jet<T, M> carries the
// Taylor coefficients c_0..c_M of a function of one variable around a point,
// with coefficients of type T (double or Dual).

#include <array>
#include <cmath>
#include <type_traits>

#include "trawl/error.hpp"
#include "trawl/special.hpp"

namespace trawl {

template <int N>
struct Dual {
  double v = 0.0;
  std::array<double, N> d{};

  constexpr Dual() = default;
  constexpr Dual(double x) : v(x) {}

  static Dual variable(double x, int i) {
    Dual r(x);
    r.d[i] = 1.0;
    return r;
  }

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) d[i] -= o.d[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    for (int i = 0; i < N; ++i) d[i] = d[i] * o.v + v * o.d[i];
    v *= o.v;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    const double inv = 1.0 / o.v;
    const double r = v * inv;
    for (int i = 0; i < N; ++i) d[i] = (d[i] - r * o.d[i]) * inv;
    v = r;
    return *this;
  }
};

template <class T>
struct is_dual : std::false_type {};
template <int N>
struct is_dual<Dual<N>> : std::true_type {};

// Result with value fv and derivative fd with respect to the argument x.
template <int N>
inline Dual<N> chain(const Dual<N>& x, double fv, double fd) {
  Dual<N> r(fv);
  for (int i = 0; i < N; ++i) r.d[i] = fd * x.d[i];
  return r;
}
inline double chain(double, double fv, double) { return fv; }

template <int N>
inline Dual<N> operator-(const Dual<N>& a) {
  Dual<N> r(-a.v);
  for (int i = 0; i < N; ++i) r.d[i] = -a.d[i];
  return r;
}
template <int N>
inline Dual<N> operator+(Dual<N> a, const Dual<N>& b) { return a += b; }
template <int N>
inline Dual<N> operator-(Dual<N> a, const Dual<N>& b) { return a -= b; }
template <int N>
inline Dual<N> operator*(Dual<N> a, const Dual<N>& b) { return a *= b; }
template <int N>
inline Dual<N> operator/(Dual<N> a, const Dual<N>& b) { return a /= b; }

template <int N>
inline Dual<N> operator+(Dual<N> a, double b) { a.v += b; return a; }
template <int N>
inline Dual<N> operator+(double b, Dual<N> a) { a.v += b; return a; }
template <int N>
inline Dual<N> operator-(Dual<N> a, double b) { a.v -= b; return a; }
template <int N>
inline Dual<N> operator-(double b, const Dual<N>& a) {
  Dual<N> r = -a;
  r.v += b;
  return r;
}
template <int N>
inline Dual<N> operator*(Dual<N> a, double b) {
  a.v *= b;
  for (int i = 0; i < N; ++i) a.d[i] *= b;
  return a;
}
template <int N>
inline Dual<N> operator*(double b, Dual<N> a) { return a * b; }
template <int N>
inline Dual<N> operator/(Dual<N> a, double b) { return a * (1.0 / b); }
template <int N>
inline Dual<N> operator/(double b, const Dual<N>& a) {
  const double r = b / a.v;
  return chain(a, r, -r / a.v);
}

template <int N>
inline bool operator<(const Dual<N>& a, const Dual<N>& b) { return a.v < b.v; }
template <int N>
inline bool operator>(const Dual<N>& a, const Dual<N>& b) { return a.v > b.v; }
template <int N>
inline bool operator<(const Dual<N>& a, double b) { return a.v < b; }
template <int N>
inline bool operator>(const Dual<N>& a, double b) { return a.v > b; }
template <int N>
inline bool operator<=(const Dual<N>& a, double b) { return a.v <= b; }
template <int N>
inline bool operator>=(const Dual<N>& a, double b) { return a.v >= b; }
template <int N>
inline bool operator<(double a, const Dual<N>& b) { return a < b.v; }
template <int N>
inline bool operator>(double a, const Dual<N>& b) { return a > b.v; }

template <int N>
inline Dual<N> exp(const Dual<N>& x) {
  const double e = std::exp(x.v);
  return chain(x, e, e);
}
template <int N>
inline Dual<N> log(const Dual<N>& x) { return chain(x, std::log(x.v), 1.0 / x.v); }
template <int N>
inline Dual<N> log1p(const Dual<N>& x) { return chain(x, std::log1p(x.v), 1.0 / (1.0 + x.v)); }
template <int N>
inline Dual<N> expm1(const Dual<N>& x) { return chain(x, std::expm1(x.v), std::exp(x.v)); }
template <int N>
inline Dual<N> sqrt(const Dual<N>& x) {
  const double s = std::sqrt(x.v);
  return chain(x, s, 0.5 / s);
}
template <int N>
inline Dual<N> abs(const Dual<N>& x) { return x.v < 0 ? -x : x; }
template <int N>
inline Dual<N> pow(const Dual<N>& x, double p) {
  const double xp = std::pow(x.v, p);
  return chain(x, xp, p == 0.0 ? 0.0 : p * std::pow(x.v, p - 1.0));
}
template <int N>
inline Dual<N> pow(const Dual<N>& x, const Dual<N>& p) { return exp(p * log(x)); }
template <int N>
inline Dual<N> pow(double x, const Dual<N>& p) {
  const double xp = std::pow(x, p.v);
  return chain(p, xp, xp * std::log(x));
}
template <int N>
inline Dual<N> lgamma(const Dual<N>& x) { return chain(x, std::lgamma(x.v), digamma(x.v)); }
template <int N>
inline Dual<N> digamma(const Dual<N>& x) { return chain(x, digamma(x.v), trigamma(x.v)); }

inline double value_of(double x) { return x; }
template <int N>
inline double value_of(const Dual<N>& x) { return x.v; }

// Truncated Taylor series c_0 + c_1 t + ... + c_M t^M.
template <class T, int M>
struct Jet {
  std::array<T, M + 1> c{};

  Jet() = default;
  template <class U>
    requires std::is_convertible_v<U, T>
  Jet(const U& x) {
    c[0] = T(x);
  }

  static Jet variable(const T& x0) {
    Jet r(x0);
    if constexpr (M >= 1) r.c[1] = T(1.0);
    return r;
  }

  bool is_constant() const {
    for (int k = 1; k <= M; ++k)
      if (value_of(c[k]) != 0.0) return false;
    return true;
  }
};

template <class T, int M>
inline double value_of(const Jet<T, M>& x) { return value_of(x.c[0]); }

template <class T, int M>
inline Jet<T, M> operator-(const Jet<T, M>& a) {
  Jet<T, M> r;
  for (int k = 0; k <= M; ++k) r.c[k] = -a.c[k];
  return r;
}
template <class T, int M>
inline Jet<T, M> operator+(Jet<T, M> a, const Jet<T, M>& b) {
  for (int k = 0; k <= M; ++k) a.c[k] = a.c[k] + b.c[k];
  return a;
}
template <class T, int M>
inline Jet<T, M> operator-(Jet<T, M> a, const Jet<T, M>& b) {
  for (int k = 0; k <= M; ++k) a.c[k] = a.c[k] - b.c[k];
  return a;
}
template <class T, int M>
inline Jet<T, M> operator*(const Jet<T, M>& a, const Jet<T, M>& b) {
  Jet<T, M> r;
  for (int k = 0; k <= M; ++k) {
    T s = a.c[0] * b.c[k];
    for (int j = 1; j <= k; ++j) s = s + a.c[j] * b.c[k - j];
    r.c[k] = s;
  }
  return r;
}
template <class T, int M>
inline Jet<T, M> operator/(const Jet<T, M>& a, const Jet<T, M>& b) {
  Jet<T, M> r;
  const T inv = T(1.0) / b.c[0];
  for (int k = 0; k <= M; ++k) {
    T s = a.c[k];
    for (int j = 1; j <= k; ++j) s = s - b.c[j] * r.c[k - j];
    r.c[k] = s * inv;
  }
  return r;
}

template <class T, int M, class U>
  requires std::is_convertible_v<U, T>
inline Jet<T, M> operator+(Jet<T, M> a, const U& b) {
  a.c[0] = a.c[0] + T(b);
  return a;
}
template <class T, int M, class U>
  requires std::is_convertible_v<U, T>
inline Jet<T, M> operator+(const U& b, Jet<T, M> a) {
  a.c[0] = a.c[0] + T(b);
  return a;
}
template <class T, int M, class U>
  requires std::is_convertible_v<U, T>
inline Jet<T, M> operator-(Jet<T, M> a, const U& b) {
  a.c[0] = a.c[0] - T(b);
  return a;
}
template <class T, int M, class U>
  requires std::is_convertible_v<U, T>
inline Jet<T, M> operator-(const U& b, const Jet<T, M>& a) {
  Jet<T, M> r = -a;
  r.c[0] = r.c[0] + T(b);
  return r;
}
template <class T, int M, class U>
  requires std::is_convertible_v<U, T>
inline Jet<T, M> operator*(Jet<T, M> a, const U& b) {
  const T bb(b);
  for (int k = 0; k <= M; ++k) a.c[k] = a.c[k] * bb;
  return a;
}
template <class T, int M, class U>
  requires std::is_convertible_v<U, T>
inline Jet<T, M> operator*(const U& b, Jet<T, M> a) {
  return a * b;
}
template <class T, int M, class U>
  requires std::is_convertible_v<U, T>
inline Jet<T, M> operator/(Jet<T, M> a, const U& b) {
  const T inv = T(1.0) / T(b);
  for (int k = 0; k <= M; ++k) a.c[k] = a.c[k] * inv;
  return a;
}
template <class T, int M, class U>
  requires std::is_convertible_v<U, T>
inline Jet<T, M> operator/(const U& b, const Jet<T, M>& a) {
  return Jet<T, M>(T(b)) / a;
}

template <class T, int M>
inline bool operator<(const Jet<T, M>& a, double b) { return value_of(a) < b; }
template <class T, int M>
inline bool operator>(const Jet<T, M>& a, double b) { return value_of(a) > b; }
template <class T, int M>
inline bool operator<=(const Jet<T, M>& a, double b) { return value_of(a) <= b; }
template <class T, int M>
inline bool operator>=(const Jet<T, M>& a, double b) { return value_of(a) >= b; }

template <class T, int M>
inline Jet<T, M> exp(const Jet<T, M>& a) {
  using std::exp;
  Jet<T, M> r;
  r.c[0] = exp(a.c[0]);
  for (int k = 1; k <= M; ++k) {
    T s = a.c[1] * r.c[k - 1];
    for (int j = 2; j <= k; ++j) s = s + double(j) * a.c[j] * r.c[k - j];
    r.c[k] = s / double(k);
  }
  return r;
}

template <class T, int M>
inline Jet<T, M> log(const Jet<T, M>& a) {
  using std::log;
  Jet<T, M> r;
  r.c[0] = log(a.c[0]);
  const T inv = T(1.0) / a.c[0];
  for (int k = 1; k <= M; ++k) {
    T s = a.c[k];
    for (int j = 1; j < k; ++j) s = s - (double(j) / double(k)) * r.c[j] * a.c[k - j];
    r.c[k] = s * inv;
  }
  return r;
}

template <class T, int M>
inline Jet<T, M> log1p(const Jet<T, M>& a) {
  using std::log1p;
  Jet<T, M> b = a + 1.0;
  Jet<T, M> r = log(b);
  r.c[0] = log1p(a.c[0]);
  return r;
}

// a^p with p constant in the series variable.
template <class T, int M, class P>
inline Jet<T, M> pow(const Jet<T, M>& a, const P& p) {
  using std::pow;
  const T pp(p);
  Jet<T, M> r;
  r.c[0] = pow(a.c[0], pp);
  const T inv = T(1.0) / a.c[0];
  for (int k = 1; k <= M; ++k) {
    T s = T(0.0);
    for (int j = 1; j <= k; ++j) s = s + ((pp + 1.0) * double(j) - double(k)) * a.c[j] * r.c[k - j];
    r.c[k] = s * inv / double(k);
  }
  return r;
}

template <class T, int M>
inline Jet<T, M> sqrt(const Jet<T, M>& a) { return pow(a, 0.5); }

// f(a(t)) given derivatives D[k] = f^{(k)}(a_0).
template <class T, int M>
inline Jet<T, M> compose(const Jet<T, M>& a, const std::array<T, M + 1>& D) {
  Jet<T, M> delta = a;
  delta.c[0] = T(0.0);
  Jet<T, M> r(D[0]);
  Jet<T, M> pw(T(1.0));
  double fact = 1.0;
  for (int k = 1; k <= M; ++k) {
    pw = pw * delta;
    fact *= k;
    for (int j = 0; j <= M; ++j) r.c[j] = r.c[j] + (D[k] / fact) * pw.c[j];
  }
  return r;
}

// Scalar function known through a routine writing derivatives 0..order at x.
using DerivativeFn = void (*)(double x, int order, double* out);

inline double apply(DerivativeFn f, double x) {
  double o[1];
  f(x, 0, o);
  return o[0];
}
template <int N>
inline Dual<N> apply(DerivativeFn f, const Dual<N>& x) {
  double o[2];
  f(x.v, 1, o);
  return chain(x, o[0], o[1]);
}
template <class T, int M>
inline Jet<T, M> apply(DerivativeFn f, const Jet<T, M>& a) {
  double o[M + 2];
  f(value_of(a.c[0]), M + 1, o);
  std::array<T, M + 1> D;
  for (int k = 0; k <= M; ++k) D[k] = chain(a.c[0], o[k], o[k + 1]);
  return compose(a, D);
}

// lgamma/digamma of a jet are only needed for arguments constant in t.
template <class T, int M>
inline Jet<T, M> lgamma(const Jet<T, M>& a) {
  using std::lgamma;
  if (!a.is_constant()) throw ConsistencyError("lgamma of a nonconstant jet");
  return Jet<T, M>(lgamma(a.c[0]));
}

}  // namespace trawl
