#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trawl/model.hpp"
#include "trawl/optimize.hpp"
#include "trawl/pairwise.hpp"

namespace trawl {

struct FitConfig {
  std::vector<int> lags = {1, 3, 5, 10, 15, 20};
  std::size_t n_samples = 1000;  // MC samples per pair
  int cv_degree = 0;
  PairMethod method = PairMethod::Auto;
  OptimizerKind optimizer = OptimizerKind::QuasiNewton;
  int max_iter = 50;
  double grad_tol = 1e-4;  // on the per-pair mean gradient, infinity norm
  std::uint64_t seed = 0;
  int threads = 1;
  bool log_space = true;
  // Per-lag sample sizes fixed at the initial parameters so that every pair
  // reaches log_se^2 <= target_rel_var, capped at max_samples.
  bool adaptive = false;
  double target_rel_var = 0.01;
  std::size_t max_samples = 100000;
  void validate() const;
};

// Lags used when none are given, by the memory of the trawl.
std::vector<int> default_lags(const TrawlFunction& tf, double tau);

// Moments and autocorrelations of a path.
struct PathMoments {
  double mean = 0.0;
  double var = 0.0;
  double m3 = 0.0;  // central
  double m4 = 0.0;  // central
  std::vector<double> acf;  // acf[k-1] at lag k tau
};
PathMoments path_moments(std::span<const double> path, int max_lag);

// Method of moments for the seed and least squares on the autocorrelation for
// the trawl. `structure` fixes the seed family and trawl type; its values are
// not used, except SupExponential weights.
ModelSpec gmm_fit(std::span<const double> path, double tau, const ModelSpec& structure, int max_lag = 0);
ModelSpec gmm_from_moments(const PathMoments& m, double tau, const ModelSpec& structure);

struct PlValue {
  double value = 0.0;  // sum of pairwise log densities
  std::vector<double> grad;
  double value_se = 0.0;
  std::vector<double> grad_se;
  std::size_t pairs = 0;
  std::size_t cv_fallbacks = 0;
};

// Pairwise log-likelihood of a path with common random numbers fixed at
// construction, so theta -> value is deterministic.
class PlObjective {
 public:
  PlObjective(std::vector<double> path, double tau, ModelSpec structure, FitConfig config);
  PlValue operator()(std::span<const double> theta) const;
  // Fixes per-lag sample sizes from an evaluation at theta (adaptive mode).
  void calibrate(std::span<const double> theta);
  const std::vector<std::size_t>& lag_samples() const { return lag_n_; }
  std::size_t pairs() const;

 private:
  std::vector<double> path_;
  double tau_;
  ModelSpec structure_;
  FitConfig cfg_;
  std::vector<std::size_t> lag_n_;
};

PlValue pl_objective(std::span<const double> path, double tau, const ModelSpec& model, const FitConfig& config);

struct FitResult {
  ModelSpec model;
  ModelSpec init;
  std::vector<double> objective_trace;  // negative mean pairwise log-likelihood
  std::vector<double> grad_norm_trace;
  double wall_time = 0.0;
  int iterations = 0;
  bool converged = false;
  bool fallback_used = false;
  std::string message;
  std::vector<std::size_t> lag_samples;
  std::size_t cv_fallbacks = 0;
};

// Maximizes the pairwise likelihood from init, or from gmm_fit when init is empty.
FitResult pl_fit(std::span<const double> path, double tau, const ModelSpec& structure, const FitConfig& config,
                 const std::optional<ModelSpec>& init = std::nullopt);

// KL(p || q) by quadrature, or by summation for discrete laws.
double kl_divergence(const SeedDistribution& p, const SeedDistribution& q);

// Weighted distances between autocorrelation functions with weight 1/(1 + k t^2).
struct AcfDistance {
  double l1 = 0.0;
  double l2 = 0.0;
};
AcfDistance acf_distance(const TrawlFunction& a, const TrawlFunction& b, double k = 0.01);

struct MetricsReport {
  std::vector<std::string> names;
  std::vector<double> rmse, mae, medae;
  double kl_mean = 0.0, kl_median = 0.0;
  double acf_l1_mean = 0.0, acf_l2_mean = 0.0;
  double acf_l1_median = 0.0, acf_l2_median = 0.0;
};
MetricsReport eval_metrics(std::span<const ModelSpec> estimates, const ModelSpec& truth);

}  // namespace trawl
