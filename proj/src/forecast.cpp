#include "trawl/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "trawl/error.hpp"
#include "trawl/pairwise.hpp"
#include "trawl/simulate.hpp"

namespace trawl {

namespace {

double binomial(double n, double p, Rng& rng) {
  if (n <= 0.0 || p <= 0.0) return 0.0;
  if (p >= 1.0) return n;
  std::binomial_distribution<long long> b(static_cast<long long>(n), p);
  return static_cast<double>(b(rng.engine()));
}

struct Slices {
  double common, left, area;
};

Slices slices_at(const ModelSpec& m, double h) {
  if (!(h > 0.0)) throw DomainError("conditional sampling needs h > 0");
  const SliceTriple s = pair_slices(m.trawl, h);
  return {s.common, s.left, m.area()};
}

// Exact inversion over the integers where p_c(c) p_l(x - c) is not negligible.
std::vector<double> discrete_conditional(const SeedDistribution& pc, const SeedDistribution& pl, double x,
                                         std::size_t n, Rng& rng) {
  const double lo = std::min(quantile(pc, 1e-15), x - quantile(pl, 1.0 - 1e-15));
  const double hi = std::max(quantile(pc, 1.0 - 1e-15), x - quantile(pl, 1e-15));
  std::vector<double> ks, lw;
  double mx = -std::numeric_limits<double>::infinity();
  for (double k = lo; k <= hi; k += 1.0) {
    const double v = log_density(pc, k) + log_density(pl, x - k);
    if (!std::isfinite(v)) continue;
    ks.push_back(k);
    lw.push_back(v);
    mx = std::max(mx, v);
  }
  if (ks.empty()) throw DomainError("conditional law is empty at this observation");
  std::vector<double> cum(ks.size());
  double s = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) cum[i] = s += std::exp(lw[i] - mx);
  std::vector<double> out(n);
  for (auto& v : out) {
    const double u = rng.uniform() * s;
    v = ks[std::min<std::size_t>(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin(), ks.size() - 1)];
  }
  return out;
}

// Rejection from the mixture of p_c and the law of x - L(A minus A_h).
std::vector<double> rejection_conditional(const SeedDistribution& pc, const SeedDistribution& pl, double x,
                                          std::size_t n, Rng& rng, ConditionalDiagnostics* diag) {
  auto log_ratio = [&](double c) {
    const double a = log_density(pc, c), b = log_density(pl, x - c);
    if (!std::isfinite(a) || !std::isfinite(b)) return -std::numeric_limits<double>::infinity();
    // log of p_c p_l / ((p_c + p_l) / 2)
    const double m = std::max(a, b);
    return a + b - (m + std::log(std::exp(a - m) + std::exp(b - m))) + std::log(2.0);
  };
  auto grid_max = [&](int k) {
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
      const double u = (i + 0.5) / k;
      best = std::max(best, log_ratio(quantile(pc, u)));
      best = std::max(best, log_ratio(x - quantile(pl, u)));
    }
    return best;
  };
  double logM = grid_max(200) + std::log(1.2);
  if (!std::isfinite(logM)) throw DomainError("conditional law is empty at this observation");
  std::vector<double> out;
  out.reserve(n);
  std::size_t proposals = 0;
  int adaptations = 0;
  bool readapted = false;
  while (out.size() < n) {
    const double c = rng.uniform() < 0.5 ? sample(pc, rng) : x - sample(pl, rng);
    ++proposals;
    const double lr = log_ratio(c);
    if (lr > logM) {
      logM = lr + std::log(1.1);
      ++adaptations;
    }
    if (std::isfinite(lr) && std::log(rng.uniform()) < lr - logM) out.push_back(c);
    if (proposals == 2000 && double(out.size()) / proposals < 0.01 && !readapted) {
      readapted = true;
      ++adaptations;
      logM = std::max(grid_max(2000), lr) + std::log(1.05);
    }
    if (proposals >= 100000 && double(out.size()) / proposals < 1e-4)
      throw ConvergenceError("rejection sampler acceptance below 1e-4 at x = " + std::to_string(x));
  }
  if (diag) {
    diag->rejection = true;
    diag->acceptance = double(n) / double(proposals);
    diag->adaptations = adaptations;
  }
  return out;
}

}  // namespace

double conditional_mean(const ModelSpec& model, double x, double h) {
  if (h < 0.0) throw DomainError("conditional_mean: h must be nonnegative");
  const double r = acf(model.trawl, h);
  return r * x + (1.0 - r) * mean(model.marginal());
}

std::vector<double> sample_common_given(const ModelSpec& model, double x, double h, std::size_t n, Rng& rng,
                                        ConditionalDiagnostics* diag) {
  const SeedDistribution& seed = model.seed;
  if (!in_support(seed, x)) throw DomainError("conditional sampling: observation outside the support");
  const Slices s = slices_at(model, h);
  if (diag) *diag = ConditionalDiagnostics{};
  std::vector<double> out(n);
  switch (seed.family()) {
    case Family::Gaussian: {
      const double m = s.common / s.area * x;
      const double sd = seed[1] * std::sqrt(s.common * s.left / s.area);
      for (auto& v : out) v = m + sd * rng.normal();
      return out;
    }
    case Family::Gamma: {
      const auto b = SeedDistribution::beta(seed[0] * s.common, seed[0] * s.left);
      for (auto& v : out) v = x * sample(b, rng);
      return out;
    }
    case Family::Poisson:
      for (auto& v : out) v = binomial(x, s.common / s.area, rng);
      return out;
    case Family::NegBinomial: {
      const auto b = SeedDistribution::beta(seed[0] * s.common, seed[0] * s.left);
      for (auto& v : out) v = binomial(x, sample(b, rng), rng);
      return out;
    }
    case Family::Skellam:
      return discrete_conditional(basis_scale(seed, s.common), basis_scale(seed, s.left), x, n, rng);
    case Family::InvGaussian:
    case Family::NIG:
      return rejection_conditional(basis_scale(seed, s.common), basis_scale(seed, s.left), x, n, rng, diag);
    default:
      throw UnsupportedError("conditional sampling: unsupported seed " + family_name(seed.family()));
  }
}

std::vector<double> conditional_sample(const ModelSpec& model, double x, double h, std::size_t n, Rng& rng,
                                       ConditionalDiagnostics* diag) {
  const Slices s = slices_at(model, h);
  std::vector<double> out = sample_common_given(model, x, h, n, rng, diag);
  const double fresh = s.area - s.common;
  if (fresh > 0.0) {
    const SeedDistribution d = basis_scale(model.seed, fresh);
    for (auto& v : out) v += sample(d, rng);
  }
  return out;
}

double sample_quantile(std::vector<double> v, double p) {
  if (v.empty()) throw DomainError("sample_quantile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("sample_quantile: p must lie in [0,1]");
  std::sort(v.begin(), v.end());
  const double pos = p * double(v.size() - 1);
  const std::size_t i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= v.size()) return v.back();
  return v[i] + (pos - double(i)) * (v[i + 1] - v[i]);
}

std::vector<ForecastRow> forecast_errors(const ModelSpec& est, const ModelSpec& truth, const std::vector<int>& horizons,
                                         const ForecastOptions& opts, const std::string& label) {
  if (horizons.empty()) throw DomainError("forecast_errors: no horizons");
  int hmax = 0;
  for (int h : horizons) {
    if (h <= 0) throw DomainError("forecast_errors: horizons must be positive");
    hmax = std::max(hmax, h);
  }
  const bool counts = est.seed.discrete();
  const std::size_t len = opts.train_length + opts.test_length + hmax;
  std::vector<std::vector<double>> err(horizons.size()), err_med(horizons.size());
  for (std::size_t r = 0; r < opts.replicates; ++r) {
    const auto x = simulate(truth, len, opts.tau, derive_seed(opts.seed, {r}));
    Rng rng(derive_seed(opts.seed, {r, 1}));
    for (std::size_t hi = 0; hi < horizons.size(); ++hi) {
      const int h = horizons[hi];
      for (std::size_t t = opts.train_length; t < opts.train_length + opts.test_length; ++t) {
        err[hi].push_back(x[t + h] - conditional_mean(est, x[t], h * opts.tau));
        if (counts) {
          const auto s = conditional_sample(est, x[t], h * opts.tau, opts.median_samples, rng);
          err_med[hi].push_back(x[t + h] - sample_quantile(s, 0.5));
        }
      }
    }
  }
  std::vector<ForecastRow> rows;
  auto emit = [&](int h, const std::vector<double>& e, const std::string& name) {
    double mae = 0.0, mse = 0.0;
    std::vector<double> a(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
      a[i] = std::abs(e[i]);
      mae += a[i];
      mse += e[i] * e[i];
    }
    rows.push_back({h, "mae", name, mae / double(e.size())});
    rows.push_back({h, "medae", name, sample_quantile(a, 0.5)});
    rows.push_back({h, "rmse", name, std::sqrt(mse / double(e.size()))});
  };
  for (std::size_t hi = 0; hi < horizons.size(); ++hi) {
    emit(horizons[hi], err[hi], label);
    if (counts) emit(horizons[hi], err_med[hi], label + "-median");
  }
  return rows;
}

MomentCheck exchangeability_check(const SeedDistribution& y, int n, int m, std::size_t reps, Rng& rng) {
  if (n < 1 || m < 1 || reps < 2) throw DomainError("exchangeability_check: need n, m >= 1 and reps >= 2");
  double s1[3] = {}, s2[3] = {};
  const double w = double(n) / double(n + m);
  for (std::size_t r = 0; r < reps; ++r) {
    double S = 0.0, T = 0.0;
    for (int i = 0; i < n + m; ++i) {
      const double v = sample(y, rng);
      if (i < n) S += v;
      T += v;
    }
    const double res = S - w * T;
    double tj = 1.0;
    for (int j = 0; j < 3; ++j) {
      const double v = res * tj;
      s1[j] += v;
      s2[j] += v * v;
      tj *= T;
    }
  }
  MomentCheck c;
  const double N = double(reps);
  for (int j = 0; j < 3; ++j) {
    const double mu = s1[j] / N;
    c.mean.push_back(mu);
    c.std_error.push_back(std::sqrt(std::max(0.0, s2[j] / N - mu * mu) / (N - 1.0)));
  }
  return c;
}

}  // namespace trawl
