#pragma once

#include <cstddef>

// Batch arithmetic used by the control-variate and summary code. Each routine
// has a scalar reference version and, where the CPU supports it, a vectorized
// one; the implementation is chosen once at startup. Setting the environment
// variable TRAWL_SIMD=scalar forces the reference versions.

namespace trawl::kernels {

enum class Isa { Scalar, Avx2, Neon };

Isa active_isa();
const char* isa_name(Isa isa);
// Overrides the dispatch choice; returns false if the ISA is unavailable.
bool set_isa(Isa isa);
bool isa_available(Isa isa);

// p[i] = sum_{l=1..m} c[l] (x[i] - x0)^l and, if dp is not null, its derivative.
// c has m+1 entries; c[0] is ignored.
void taylor_eval(const double* c, int m, double x0, const double* x, std::size_t n, double* p, double* dp);
double sum(const double* x, std::size_t n);
// sum_i (x[i] - mx) (y[i] - my)
double centered_dot(const double* x, double mx, const double* y, double my, std::size_t n);
// y[i] += a * x[i]
void axpy(double a, const double* x, double* y, std::size_t n);

namespace scalar {
void taylor_eval(const double* c, int m, double x0, const double* x, std::size_t n, double* p, double* dp);
double sum(const double* x, std::size_t n);
double centered_dot(const double* x, double mx, const double* y, double my, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
}  // namespace scalar

namespace avx2 {
void taylor_eval(const double* c, int m, double x0, const double* x, std::size_t n, double* p, double* dp);
double sum(const double* x, std::size_t n);
double centered_dot(const double* x, double mx, const double* y, double my, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
}  // namespace avx2

namespace neon {
void taylor_eval(const double* c, int m, double x0, const double* x, std::size_t n, double* p, double* dp);
double sum(const double* x, std::size_t n);
double centered_dot(const double* x, double mx, const double* y, double my, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
}  // namespace neon

}  // namespace trawl::kernels
