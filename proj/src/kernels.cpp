#include "trawl/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace trawl::kernels {

namespace scalar {

void taylor_eval(const double* c, int m, double x0, const double* x, std::size_t n, double* p, double* dp) {
  for (std::size_t i = 0; i < n; ++i) {
    const double t = x[i] - x0;
    double q = c[m], d = m * c[m];
    for (int l = m - 1; l >= 1; --l) {
      q = q * t + c[l];
      d = d * t + l * c[l];
    }
    p[i] = q * t;
    if (dp) dp[i] = d;
  }
}

double sum(const double* x, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += x[i];
    s1 += x[i + 1];
    s2 += x[i + 2];
    s3 += x[i + 3];
  }
  for (; i < n; ++i) s0 += x[i];
  return (s0 + s1) + (s2 + s3);
}

double centered_dot(const double* x, double mx, const double* y, double my, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += (x[i] - mx) * (y[i] - my);
    s1 += (x[i + 1] - mx) * (y[i + 1] - my);
    s2 += (x[i + 2] - mx) * (y[i + 2] - my);
    s3 += (x[i + 3] - mx) * (y[i + 3] - my);
  }
  for (; i < n; ++i) s0 += (x[i] - mx) * (y[i] - my);
  return (s0 + s1) + (s2 + s3);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

}  // namespace scalar

#if defined(__ARM_NEON)
}  // namespace trawl::kernels
#include <arm_neon.h>
namespace trawl::kernels {
namespace neon {
void taylor_eval(const double* c, int m, double x0, const double* x, std::size_t n, double* p, double* dp) {
  std::size_t i = 0;
  const float64x2_t vx0 = vdupq_n_f64(x0);
  for (; i + 2 <= n; i += 2) {
    const float64x2_t t = vsubq_f64(vld1q_f64(x + i), vx0);
    float64x2_t q = vdupq_n_f64(c[m]);
    float64x2_t d = vdupq_n_f64(m * c[m]);
    for (int l = m - 1; l >= 1; --l) {
      q = vfmaq_f64(vdupq_n_f64(c[l]), q, t);
      d = vfmaq_f64(vdupq_n_f64(l * c[l]), d, t);
    }
    vst1q_f64(p + i, vmulq_f64(q, t));
    if (dp) vst1q_f64(dp + i, d);
  }
  if (i < n) scalar::taylor_eval(c, m, x0, x + i, n - i, p + i, dp ? dp + i : nullptr);
}
double sum(const double* x, std::size_t n) {
  float64x2_t a = vdupq_n_f64(0.0), b = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a = vaddq_f64(a, vld1q_f64(x + i));
    b = vaddq_f64(b, vld1q_f64(x + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(a, b));
  for (; i < n; ++i) s += x[i];
  return s;
}
double centered_dot(const double* x, double mx, const double* y, double my, std::size_t n) {
  const float64x2_t vmx = vdupq_n_f64(mx), vmy = vdupq_n_f64(my);
  float64x2_t a = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    a = vfmaq_f64(a, vsubq_f64(vld1q_f64(x + i), vmx), vsubq_f64(vld1q_f64(y + i), vmy));
  double s = vaddvq_f64(a);
  for (; i < n; ++i) s += (x[i] - mx) * (y[i] - my);
  return s;
}
void axpy(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}
}  // namespace neon
#else
namespace neon {
void taylor_eval(const double* c, int m, double x0, const double* x, std::size_t n, double* p, double* dp) {
  scalar::taylor_eval(c, m, x0, x, n, p, dp);
}
double sum(const double* x, std::size_t n) { return scalar::sum(x, n); }
double centered_dot(const double* x, double mx, const double* y, double my, std::size_t n) {
  return scalar::centered_dot(x, mx, y, my, n);
}
void axpy(double a, const double* x, double* y, std::size_t n) { scalar::axpy(a, x, y, n); }
}  // namespace neon
#endif

namespace {

struct Table {
  Isa isa;
  void (*taylor_eval)(const double*, int, double, const double*, std::size_t, double*, double*);
  double (*sum)(const double*, std::size_t);
  double (*centered_dot)(const double*, double, const double*, double, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
};

constexpr Table kScalar{Isa::Scalar, scalar::taylor_eval, scalar::sum, scalar::centered_dot, scalar::axpy};
constexpr Table kAvx2{Isa::Avx2, avx2::taylor_eval, avx2::sum, avx2::centered_dot, avx2::axpy};
constexpr Table kNeon{Isa::Neon, neon::taylor_eval, neon::sum, neon::centered_dot, neon::axpy};

Table choose() {
  const char* env = std::getenv("TRAWL_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return kScalar;
  if (isa_available(Isa::Avx2)) return kAvx2;
  if (isa_available(Isa::Neon)) return kNeon;
  return kScalar;
}

Table& table() {
  static Table t = choose();
  return t;
}

}  // namespace

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(__i386__)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(__ARM_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() { return table().isa; }

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
    case Isa::Neon:
      return "neon";
  }
  return "?";
}

bool set_isa(Isa isa) {
  if (!isa_available(isa)) return false;
  table() = isa == Isa::Avx2 ? kAvx2 : isa == Isa::Neon ? kNeon : kScalar;
  return true;
}

void taylor_eval(const double* c, int m, double x0, const double* x, std::size_t n, double* p, double* dp) {
  if (m < 1) {
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = 0.0;
      if (dp) dp[i] = 0.0;
    }
    return;
  }
  table().taylor_eval(c, m, x0, x, n, p, dp);
}
double sum(const double* x, std::size_t n) { return table().sum(x, n); }
double centered_dot(const double* x, double mx, const double* y, double my, std::size_t n) {
  return table().centered_dot(x, mx, y, my, n);
}
void axpy(double a, const double* x, double* y, std::size_t n) { table().axpy(a, x, y, n); }

}  // namespace trawl::kernels
