#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trawl/forecast.hpp"
#include "trawl/infer.hpp"
#include "trawl/model.hpp"

namespace trawl {

// Gradient of the log pairwise likelihood: bias and spread of SF and PG
// estimators with Taylor control variates, over replications with the path fixed.
struct GradBenchConfig {
  ModelSpec truth{SeedDistribution::gamma(6.0, 1.75), TrawlFunction::gamma(1.25, 1.0)};
  std::size_t n = 1500;
  double tau = 0.5;
  std::vector<int> lags = {1, 3, 5, 10, 15, 20};
  std::size_t samples = 750;  // per pair, independent across pairs
  std::size_t replicates = 20;
  std::vector<int> degrees = {0, 1, 2, 3};
  bool score_function = true;  // also run SF
  bool pilot = false;          // control-variate coefficients from a pilot fraction
  bool at_truth = false;       // evaluate at the simulation parameters, not the GMM estimate
  std::uint64_t seed = 0;
  int threads = 1;
};

struct GradBenchRow {
  std::string estimator;
  int degree = 0;
  std::string parameter;
  double bias = 0.0, sd = 0.0, mae = 0.0, medae = 0.0, rmse = 0.0;
};

struct GradBenchResult {
  ModelSpec at;                    // GMM estimate on the simulated path, or the truth
  std::vector<double> true_grad;  // quadrature reference
  std::vector<GradBenchRow> rows;
  // estimates[e][d][r] for estimator e (SF then PG), degree index d, replicate r.
  std::vector<std::vector<std::vector<std::vector<double>>>> estimates;
};

GradBenchResult grad_bench(const GradBenchConfig& cfg);

// Gradient of sum_pairs log p by central differences of quadrature densities.
std::vector<double> quadrature_pl_gradient(const std::vector<double>& path, double tau, const ModelSpec& model,
                                           const std::vector<int>& lags, int threads = 1);

// Per-pair standard deviation ratios at lag 1 on paths with parameters drawn
// from the priors alpha, beta ~ Gamma(6, 4), lambda ~ Gamma(4, 4):
//   r^m = sd of the control-variate residual / sd of f, m in degrees;
//   r_theta = sd of the PG / SF gradient samples, per component, counting only
//   the part due to the dependence of q on theta.
struct CvBenchConfig {
  std::size_t paths = 1;
  std::size_t n = 750;
  double tau = 0.5;
  std::size_t samples = 1000;
  std::vector<int> degrees = {1, 2, 3};
  std::vector<double> quantiles = {0.05, 0.25, 0.5, 0.75, 0.95};
  std::uint64_t seed = 0;
  int threads = 1;
};

struct CvBenchRow {
  std::size_t path = 0;
  std::string statistic;  // "r^m" or "pg/sf:<parameter>"
  int degree = 0;
  double quantile = 0.0;
  double ratio = 0.0;
};

struct CvBenchResult {
  std::vector<ModelSpec> truths;
  std::vector<ModelSpec> at;
  std::vector<CvBenchRow> rows;
  // Median over pairs of r^m on each path, per degree.
  std::vector<std::vector<double>> median_ratio;
};

CvBenchResult cv_bench(const CvBenchConfig& cfg);

// GMM against PL on replicated paths of one model.
struct InferenceBenchConfig {
  ModelSpec truth{SeedDistribution::gamma(3.0, 0.75), TrawlFunction::exponential(0.25)};
  std::size_t n = 500;
  double tau = 1.0;
  std::size_t replicates = 20;
  FitConfig fit;
  std::uint64_t seed = 0;
};

struct InferenceBenchResult {
  std::vector<std::string> names;
  std::vector<ModelSpec> gmm, pl;
  std::vector<double> pl_seconds;
  std::vector<bool> pl_converged;
  MetricsReport gmm_metrics, pl_metrics;
  std::vector<double> rmse_ratio;  // PL / GMM per parameter
};

InferenceBenchResult inference_bench(const InferenceBenchConfig& cfg);

// Forecast errors of the true, GMM and PL models, each fitted to one training path.
struct ForecastBenchConfig {
  ModelSpec truth{SeedDistribution::gamma(3.0, 0.75), TrawlFunction::exponential(0.25)};
  std::size_t fit_length = 500;
  std::vector<int> horizons = {1, 2, 5, 10};
  ForecastOptions forecast;
  FitConfig fit;
  std::uint64_t seed = 0;
};

struct ForecastBenchResult {
  ModelSpec gmm, pl;
  std::vector<ForecastRow> rows;
};

ForecastBenchResult forecast_bench(const ForecastBenchConfig& cfg);

}  // namespace trawl
