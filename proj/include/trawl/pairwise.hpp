#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "trawl/cv.hpp"
#include "trawl/mcgrad.hpp"
#include "trawl/model.hpp"

namespace trawl {

// Observations x_s, x_t at lag h > 0 of a trawl process.
struct PairContext {
  double xs = 0.0;
  double xt = 0.0;
  double h = 1.0;
  ModelSpec model;
  SliceTriple slices() const { return pair_slices(model.trawl, h); }
};

// The pairwise density is E[f(Z)] over Z = L(A_s and A_t). The problem is
// parameterized by eta = (seed parameters, common area, side area); the
// Jacobian d eta / d theta maps its gradients to the model parameters.
struct PairProblem {
  std::unique_ptr<Problem> problem;
  std::vector<double> eta_jacobian;  // eta_dim x theta_dim, row-major
  int eta_dim = 0;
  int theta_dim = 0;
};
PairProblem make_pair_problem(const PairContext& ctx);

// Law of the expectation variable for all pairs at lag h. Gamma seeds use the
// Beta reparameterization; other seeds use basis_scale(seed, common area),
// truncated to (0, min(x_s, x_t)] for positive seeds (the truncation depends
// on the pair, so those draws cannot be shared).
Distribution pair_mixing_law(const ModelSpec& model, double h);
bool pair_mixing_law_shared(const ModelSpec& model);

bool in_support(const SeedDistribution& seed, double x);

enum class PairMethod { Auto, PG, SF, MVG, Hybrid, Exact };
const char* pair_method_name(PairMethod m);
PairMethod pair_method_from_name(const std::string& name);
// Auto: exact sums for discrete seeds, PG otherwise.
PairMethod resolve_method(PairMethod m, const SeedDistribution& seed);

struct PairOptions {
  PairMethod method = PairMethod::Auto;
  std::size_t n = 1000;
  int cv_degree = 0;
  bool pilot = false;
  // Grow n until Var(U)/(n mean^2) <= target_rel_var, up to max_n.
  bool adaptive = false;
  double target_rel_var = 0.01;
  std::size_t max_n = 100000;
};

struct PairEstimate {
  double log_density = -std::numeric_limits<double>::infinity();
  double log_se = 0.0;
  double log_bias = 0.0;
  double density = 0.0;  // may underflow where log_density does not
  double density_se = 0.0;
  std::vector<double> grad;  // gradient of log density in theta
  std::vector<double> grad_se;
  std::size_t n = 0;
  bool exact = false;
  bool outside_support = false;
  bool moments_unavailable = false;
};

// Monte Carlo value of the pairwise density (no gradient).
PairEstimate pairwise_density_mc(const PairContext& ctx, std::size_t n, Rng& rng, int cv_degree = 0);

// Exact sums for Poisson, negative binomial and Skellam seeds. The Skellam sum
// is unbounded; it stops once summands fall below tail_tol of the total.
double pairwise_density_discrete(const PairContext& ctx, double tail_tol = 1e-14);
PairEstimate pairwise_logdensity_discrete(const PairContext& ctx, double tail_tol = 1e-14);

// Adaptive quadrature of the convolution integral over the common slice.
double pairwise_density_quadrature(const PairContext& ctx, double rel_tol = 1e-8);

// log density and its theta-gradient. Base uniforms are drawn from rng.
PairEstimate pairwise_logdensity_and_grad(const PairContext& ctx, const PairOptions& opts, Rng& rng);
// Same with given base uniforms and, when not null, draws of
// pair_mixing_law(model, h) shared with other pairs at the same lag.
PairEstimate pairwise_logdensity_and_grad(const PairContext& ctx, const PairOptions& opts, const BaseSamples& base,
                                          const Draws* shared);

// Estimates at each control-variate degree from one set of draws of
// pair_mixing_law(model, h).
std::vector<PairEstimate> pairwise_degree_sweep(const PairContext& ctx, const Draws& draws,
                                                std::span<const int> degrees, bool pilot = false);

// Per-sample values and theta-gradients of the pairwise integrand, after
// control variates of the given degree.
SampleSet pair_samples_theta(const PairContext& ctx, const Draws& draws, int cv_degree, CvReport* report = nullptr);

}  // namespace trawl
