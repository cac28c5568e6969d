#pragma once

#include <functional>

namespace trawl {

struct QuadOptions {
  double abs_tol = 0.0;
  double rel_tol = 1e-10;
  int max_subdivisions = 4000;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

using Integrand1D = std::function<double(double)>;

// Adaptive 21-point Gauss-Kronrod. Infinite limits are mapped to finite ones.
QuadResult integrate(const Integrand1D& f, double a, double b, const QuadOptions& opts = {});

// For integrands behaving like (x-a)^(alpha_a-1) near a and (b-x)^(alpha_b-1)
// near b: the interval is split at its midpoint and each half is integrated
// after a power substitution that removes the endpoint singularity.
QuadResult integrate_singular(const Integrand1D& f, double a, double b, double alpha_a,
                              double alpha_b, const QuadOptions& opts = {});

}  // namespace trawl
