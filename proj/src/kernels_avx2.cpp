#include "trawl/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#endif

namespace trawl::kernels::avx2 {

#if defined(__AVX2__) && defined(__FMA__)

namespace {
double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}
}  // namespace

void taylor_eval(const double* c, int m, double x0, const double* x, std::size_t n, double* p, double* dp) {
  const __m256d vx0 = _mm256_set1_pd(x0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d t = _mm256_sub_pd(_mm256_loadu_pd(x + i), vx0);
    __m256d q = _mm256_set1_pd(c[m]);
    __m256d d = _mm256_set1_pd(m * c[m]);
    for (int l = m - 1; l >= 1; --l) {
      q = _mm256_fmadd_pd(q, t, _mm256_set1_pd(c[l]));
      d = _mm256_fmadd_pd(d, t, _mm256_set1_pd(l * c[l]));
    }
    _mm256_storeu_pd(p + i, _mm256_mul_pd(q, t));
    if (dp) _mm256_storeu_pd(dp + i, d);
  }
  if (i < n) scalar::taylor_eval(c, m, x0, x + i, n - i, p + i, dp ? dp + i : nullptr);
}

double sum(const double* x, std::size_t n) {
  __m256d a = _mm256_setzero_pd(), b = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a = _mm256_add_pd(a, _mm256_loadu_pd(x + i));
    b = _mm256_add_pd(b, _mm256_loadu_pd(x + i + 4));
  }
  double s = hsum(_mm256_add_pd(a, b));
  for (; i < n; ++i) s += x[i];
  return s;
}

double centered_dot(const double* x, double mx, const double* y, double my, std::size_t n) {
  const __m256d vmx = _mm256_set1_pd(mx), vmy = _mm256_set1_pd(my);
  __m256d a = _mm256_setzero_pd(), b = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a = _mm256_fmadd_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), vmx), _mm256_sub_pd(_mm256_loadu_pd(y + i), vmy), a);
    b = _mm256_fmadd_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i + 4), vmx),
                        _mm256_sub_pd(_mm256_loadu_pd(y + i + 4), vmy), b);
  }
  double s = hsum(_mm256_add_pd(a, b));
  for (; i < n; ++i) s += (x[i] - mx) * (y[i] - my);
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

#else

void taylor_eval(const double* c, int m, double x0, const double* x, std::size_t n, double* p, double* dp) {
  scalar::taylor_eval(c, m, x0, x, n, p, dp);
}
double sum(const double* x, std::size_t n) { return scalar::sum(x, n); }
double centered_dot(const double* x, double mx, const double* y, double my, std::size_t n) {
  return scalar::centered_dot(x, mx, y, my, n);
}
void axpy(double a, const double* x, double* y, std::size_t n) { scalar::axpy(a, x, y, n); }

#endif

}  // namespace trawl::kernels::avx2
