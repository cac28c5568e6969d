#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "trawl/dist.hpp"
#include "trawl/rng.hpp"

namespace trawl {

// Highest Taylor degree available for control variates.
inline constexpr int kMaxCvDegree = 5;

// An expectation E_{q(z; theta)}[f(z, theta)] whose gradient in theta is
// estimated. The parameters of q are functions of theta with Jacobian
// q_jacobian() (rows: parameters of q, columns: theta).
class Problem {
 public:
  virtual ~Problem() = default;
  virtual int dim() const = 0;
  virtual const std::vector<double>& theta() const = 0;
  virtual const Distribution& q() const = 0;
  virtual const std::vector<double>& q_jacobian() const = 0;
  virtual double f(double z) const = 0;
  // f(z) and df/dz.
  virtual double f_dz(double z, double& dfdz) const = 0;
  // f(z) and its theta-gradient (length dim()).
  virtual double f_grad(double z, double* grad) const = 0;
  // Taylor coefficients c[l] = f^(l)(z0)/l!, l = 0..m, and their theta-gradients
  // cg[l * dim() + i].
  virtual void taylor(double z0, int m, double* c, double* cg) const = 0;
  // The same problem at another theta, with the same log_scale().
  virtual std::unique_ptr<Problem> at(std::span<const double> theta) const = 0;
  // Values of f are exp(-log_scale()) times the target integrand.
  virtual double log_scale() const { return 0.0; }
};

// Base randomness shared by all estimators (common random numbers).
inline constexpr int kBaseDim = 2;
struct BaseSamples {
  std::size_t n = 0;
  std::vector<double> u;  // n x kBaseDim
  const double* row(std::size_t i) const { return u.data() + i * kBaseDim; }
};
BaseSamples draw_base(std::size_t n, Rng& rng);

// Sample of q driven by base uniforms; consistent across estimators.
double draw_value(const Distribution& q, const double* u);

enum class Estimator { SF, PG, MVG, Hybrid, FD };
const char* estimator_name(Estimator e);
Estimator estimator_from_name(const std::string& name);

// Per-sample quantities. The gradient sample is a[j][i] + b[j][i]: a is the
// part due to the parameters of q, b = grad_theta f. For PG, a = f'(z) w and
// for SF, a = f(z) w, with w the pathwise gradient or score in theta.
struct SampleSet {
  Estimator kind = Estimator::PG;
  int dim = 0;
  std::size_t n = 0;
  std::vector<double> z;
  std::vector<double> u;
  std::vector<double> dfdz;
  std::vector<std::vector<double>> a;
  std::vector<std::vector<double>> b;
  std::vector<std::vector<double>> w;
  double v(int j, std::size_t i) const { return a[j][i] + b[j][i]; }
};

// Draws of q with their per-sample gradient weights in the native parameters
// of q: pathwise gradients (PG) or scores (SF). Draws depend only on q, so
// they can be shared by problems with the same q.
struct Draws {
  Estimator kind = Estimator::PG;
  std::size_t n = 0;
  std::vector<double> z;
  std::vector<std::vector<double>> g;
};
Draws make_draws(Estimator kind, const Distribution& q, const BaseSamples& base);
SampleSet samples_from_draws(const Problem& p, const Draws& d);
// Values only; gradient parts are zero.
SampleSet value_samples(const Problem& p, const BaseSamples& base);

SampleSet sf_samples(const Problem& p, const BaseSamples& base);
SampleSet pg_samples(const Problem& p, const BaseSamples& base);
SampleSet mvg_samples(const Problem& p, const BaseSamples& base, bool coupled = true);
// q must be NegBinomial: Gamma mixing stage (pathwise) then Poisson stage (MVG).
SampleSet hybrid_samples(const Problem& p, const BaseSamples& base);
// Central differences with common random numbers, step rel_step * max(1, |theta_i|).
SampleSet fd_samples(const Problem& p, const BaseSamples& base, double rel_step = 1e-3);
SampleSet estimator_samples(Estimator e, const Problem& p, const BaseSamples& base);

struct GradEstimate {
  std::vector<double> value;
  std::vector<double> std_error;
  std::size_t n = 0;
};

struct ValueEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

GradEstimate summarize_gradient(const SampleSet& s);
ValueEstimate summarize_value(const SampleSet& s);

// log of the mean of u and the ratio mean(v)/mean(u), with delta-method errors.
struct LogRatioEstimate {
  double value = 0.0;      // mean of u
  double value_se = 0.0;
  double log_value = 0.0;
  double log_se = 0.0;
  double log_bias = 0.0;   // -Var(u) / (2 N mean^2)
  std::vector<double> ratio;
  std::vector<double> ratio_se;
  std::size_t n = 0;
};
LogRatioEstimate log_ratio(const SampleSet& s);

GradEstimate sf_estimate(const Problem& p, std::size_t n, Rng& rng);
GradEstimate pg_estimate(const Problem& p, std::size_t n, Rng& rng);
GradEstimate mvg_estimate(const Problem& p, std::size_t n, Rng& rng, bool coupled = true);
GradEstimate hybrid_estimate(const Problem& p, std::size_t n, Rng& rng);
GradEstimate fd_estimate(const Problem& p, std::size_t n, Rng& rng, double rel_step = 1e-3);

// Weak derivative d/d theta_k q = c_plus q_plus - c_minus q_minus.
struct WeakDerivative {
  double c_plus = 0.0;
  double c_minus = 0.0;
  bool discrete = false;
  std::function<double(double)> plus_density;
  std::function<double(double)> minus_density;
  std::function<double(double)> plus_quantile;
  std::function<double(double)> minus_quantile;
};
// Gaussian (mu, sigma), Poisson (lambda), Skellam (mu1, mu2).
WeakDerivative mvg_decompose(const SeedDistribution& q, int component);

// Sequential reparameterization z_k = g_k(z_{k-1}, u_k; theta).
struct ChainStage {
  // Returns z_k and writes dz_k/dtheta (partial, length dim) and dz_k/dz_{k-1}.
  std::function<double(double parent, double u, double* dtheta, double& dparent)> draw;
};
// f returns f(z) and writes df/dz and grad_theta f.
using ChainIntegrand = std::function<double(double z, double& dfdz, double* grad)>;
GradEstimate standardization_chain(const std::vector<ChainStage>& stages, const ChainIntegrand& f, int dim,
                                   std::size_t n, Rng& rng);
// NIG(alpha, beta, delta, mu): inverse Gaussian mixing stage, then Gaussian stage.
std::vector<ChainStage> nig_chain_stages(const SeedDistribution& q);

}  // namespace trawl
