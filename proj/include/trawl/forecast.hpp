#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trawl/model.hpp"
#include "trawl/rng.hpp"

namespace trawl {

// E[X_{t+h} | X_t = x] = rho(h) x + (1 - rho(h)) E[X_t].
double conditional_mean(const ModelSpec& model, double x, double h);

struct ConditionalDiagnostics {
  bool rejection = false;  // no closed conditional law; rejection sampling used
  double acceptance = 1.0;
  int adaptations = 0;
};

// Samples of L(A_t and A_{t+h}) given X_t = x.
std::vector<double> sample_common_given(const ModelSpec& model, double x, double h, std::size_t n, Rng& rng,
                                        ConditionalDiagnostics* diag = nullptr);

// Samples of X_{t+h} given X_t = x: the common slice given x plus an independent new slice.
std::vector<double> conditional_sample(const ModelSpec& model, double x, double h, std::size_t n, Rng& rng,
                                       ConditionalDiagnostics* diag = nullptr);

// Empirical quantile (type 7) of a sample.
double sample_quantile(std::vector<double> v, double p);

struct ForecastOptions {
  double tau = 1.0;
  std::size_t train_length = 250;  // forecasts use observations after this index
  std::size_t test_length = 250;
  std::size_t replicates = 20;
  std::uint64_t seed = 0;
  std::size_t median_samples = 201;  // conditional-median forecasts of count seeds
};

struct ForecastRow {
  int horizon = 0;  // in steps of tau
  std::string metric;
  std::string estimator;
  double value = 0.0;
};

// Out-of-sample errors of conditional-mean forecasts made with `est` on paths
// simulated from `truth`. Count seeds also get conditional-median rows.
std::vector<ForecastRow> forecast_errors(const ModelSpec& est, const ModelSpec& truth, const std::vector<int>& horizons,
                                         const ForecastOptions& opts, const std::string& label = "model");

// For iid Y_1..Y_{n+m} with total T and S the sum of the first n:
// E[(S - n T/(n+m)) T^j] for j = 0, 1, 2, which vanish by exchangeability.
struct MomentCheck {
  std::vector<double> mean;
  std::vector<double> std_error;
};
MomentCheck exchangeability_check(const SeedDistribution& y, int n, int m, std::size_t reps, Rng& rng);

}  // namespace trawl
