#pragma once

#include <optional>
#include <span>
#include <vector>

#include "trawl/mcgrad.hpp"

namespace trawl {

// T(z) = sum_{l=1..m} c[l] (z - z0)^l with c[l] = f^(l)(z0)/l!.
struct TaylorCV {
  int degree = 0;
  double z0 = 0.0;
  int dim = 0;
  std::vector<double> c;   // m+1 entries, c[0] = f(z0)
  std::vector<double> cg;  // (m+1) x dim, theta-gradients of c
  double operator()(double z) const;
};

TaylorCV build_taylor(const Problem& p, double z0, int m);
// Expansion point used when none is given: the mean of q (of the untruncated
// law, clipped into the support, for truncated q).
double default_expansion_point(const Distribution& q);

struct GammaEstimate {
  double gamma = 0.0;
  double residual_factor = 1.0;  // 1 - Corr(f, h)^2
  bool degenerate = false;       // Var(h) = 0
};
GammaEstimate optimal_gamma(std::span<const double> f, std::span<const double> h);

struct CvOptions {
  int degree = 1;
  std::optional<double> z0;
  // Estimate the coefficients on a leading fraction of the samples and drop
  // those samples from the estimate.
  bool pilot = false;
  double pilot_fraction = 0.2;
  // Use this coefficient for every control variate instead of estimating it.
  std::optional<double> fixed_gamma;
};

struct CvReport {
  TaylorCV taylor;
  double gamma0 = 0.0;
  std::vector<double> gamma1;
  std::vector<double> gamma2;
  double residual_factor0 = 1.0;
  bool moments_unavailable = false;
  std::size_t pilot_samples = 0;
};

// Replaces u, a and b of the sample set by their control-variate adjusted
// versions. Expectations are unchanged. Only SF and PG sample sets are
// supported. degree 0 leaves the set unchanged.
CvReport apply_control_variates(const Problem& p, SampleSet& s, const CvOptions& opts);

struct CvEstimate {
  ValueEstimate value;
  GradEstimate gradient;
  CvReport report;
};
CvEstimate cv_density_estimate(const Problem& p, std::size_t n, Rng& rng, const CvOptions& opts);
CvEstimate cv_gradient_estimate(const Problem& p, std::size_t n, Rng& rng, Estimator engine, const CvOptions& opts);

}  // namespace trawl
