#include "trawl/infer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "trawl/error.hpp"
#include "trawl/parallel.hpp"
#include "trawl/quadrature.hpp"
#include "trawl/rng.hpp"

namespace trawl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t m = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + m, v.end());
  double r = v[m];
  if (v.size() % 2 == 0) r = 0.5 * (r + *std::max_element(v.begin(), v.begin() + m));
  return r;
}

// Solves the small dense system A x = b by Gaussian elimination with pivoting.
std::vector<double> solve(std::vector<double> A, std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  for (int c = 0; c < n; ++c) {
    int p = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(A[r * n + c]) > std::abs(A[p * n + c])) p = r;
    if (A[p * n + c] == 0.0) throw ConvergenceError("singular system in least squares");
    if (p != c) {
      for (int k = 0; k < n; ++k) std::swap(A[c * n + k], A[p * n + k]);
      std::swap(b[c], b[p]);
    }
    for (int r = c + 1; r < n; ++r) {
      const double f = A[r * n + c] / A[c * n + c];
      for (int k = c; k < n; ++k) A[r * n + k] -= f * A[c * n + k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int k = r + 1; k < n; ++k) s -= A[r * n + k] * x[k];
    x[r] = s / A[r * n + r];
  }
  return x;
}

// Levenberg-Marquardt on sum_k (rho(k tau) - target_k)^2 in log parameters.
TrawlFunction fit_acf(const TrawlFunction& structure, double tau, const std::vector<double>& target) {
  const int d = structure.size();
  std::vector<double> u(d, 0.0);
  if (structure.kind() == TrawlKind::SupExponential)
    for (int j = 0; j < d; ++j) u[j] = std::log(4.0) * (j - 0.5 * (d - 1));
  auto at = [&](const std::vector<double>& v) {
    std::vector<double> p(d);
    for (int j = 0; j < d; ++j) p[j] = std::exp(v[j]);
    return structure.with_params(p);
  };
  auto sse = [&](const TrawlFunction& tf) {
    double s = 0.0;
    for (std::size_t k = 0; k < target.size(); ++k) {
      const double r = acf(tf, (k + 1) * tau) - target[k];
      s += r * r;
    }
    return s;
  };
  TrawlFunction tf = at(u);
  double cur = sse(tf);
  double mu = 1e-3;
  for (int it = 0; it < 500; ++it) {
    std::vector<double> JtJ(d * d, 0.0), Jtr(d, 0.0);
    for (std::size_t k = 0; k < target.size(); ++k) {
      const double h = (k + 1) * tau;
      const double r = acf(tf, h) - target[k];
      auto g = acf_gradient(tf, h);
      for (int j = 0; j < d; ++j) g[j] *= tf[j];
      for (int i = 0; i < d; ++i) {
        Jtr[i] += g[i] * r;
        for (int j = 0; j < d; ++j) JtJ[i * d + j] += g[i] * g[j];
      }
    }
    double gmax = 0.0;
    for (double v : Jtr) gmax = std::max(gmax, std::abs(v));
    if (gmax < 1e-15) break;
    bool improved = false;
    for (int tries = 0; tries < 40; ++tries) {
      auto A = JtJ;
      for (int i = 0; i < d; ++i) A[i * d + i] += mu * (JtJ[i * d + i] + 1e-12);
      std::vector<double> b(d);
      for (int i = 0; i < d; ++i) b[i] = -Jtr[i];
      std::vector<double> step;
      try {
        step = solve(A, b);
      } catch (const ConvergenceError&) {
        mu *= 10.0;
        continue;
      }
      double smax = 0.0;
      for (double& s : step) {
        s = std::clamp(s, -3.0, 3.0);
        smax = std::max(smax, std::abs(s));
      }
      std::vector<double> un(d);
      for (int j = 0; j < d; ++j) un[j] = u[j] + step[j];
      double next = kInf;
      TrawlFunction cand = tf;
      try {
        cand = at(un);
        next = sse(cand);
      } catch (const DomainError&) {
      }
      if (std::isfinite(next) && next <= cur) {
        const bool tiny = smax < 1e-13 || cur - next <= 1e-30;
        u = un;
        tf = cand;
        cur = next;
        mu = std::max(mu * 0.3, 1e-12);
        improved = !tiny;
        if (tiny) it = 1 << 20;
        break;
      }
      mu *= 10.0;
    }
    if (!improved) break;
  }
  return tf;
}

// Method of moments for the seed given the moments of X_t = L(A), Leb(A) = L.
SeedDistribution seed_from_moments(const SeedDistribution& structure, const PathMoments& m, double L) {
  const double mu = m.mean, v = m.var;
  if (!(v > 0.0)) throw DomainError("method of moments: empirical variance is not positive");
  switch (structure.family()) {
    case Family::Poisson:
      if (!(mu > 0.0)) throw DomainError("method of moments: Poisson mean must be positive");
      return SeedDistribution::poisson(mu / L);
    case Family::NegBinomial: {
      if (!(mu > 0.0)) throw DomainError("method of moments: negative binomial mean must be positive");
      const double p = std::clamp(1.0 - mu / v, 1e-6, 1.0 - 1e-9);
      return SeedDistribution::negbinomial(mu * (1.0 - p) / (p * L), p);
    }
    case Family::Skellam: {
      const double a = std::max(0.5 * (v + mu), 1e-6 * v), b = std::max(0.5 * (v - mu), 1e-6 * v);
      return SeedDistribution::skellam(a / L, b / L);
    }
    case Family::Gamma:
      if (!(mu > 0.0)) throw DomainError("method of moments: Gamma mean must be positive");
      return SeedDistribution::gamma(mu * mu / (v * L), mu / v);
    case Family::InvGaussian: {
      if (!(mu > 0.0)) throw DomainError("method of moments: inverse Gaussian mean must be positive");
      const double mean1 = mu / L;
      return SeedDistribution::inv_gaussian(mean1, mean1 * mean1 * mean1 * L / v);
    }
    case Family::Gaussian:
      return SeedDistribution::gaussian(mu / L, std::sqrt(v / L));
    case Family::NIG: {
      const double s = m.m3 / std::pow(v, 1.5);
      const double k = m.m4 / (v * v) - 3.0;
      double r2 = 0.0, zeta = 0.0;
      const double den = 3.0 * k - 4.0 * s * s;
      if (k > 0.0 && den > 0.0 && s * s < 0.9 * den) {
        r2 = s * s / den;
        zeta = 9.0 / den;
      } else {
        // Outside the NIG moment region: symmetric fit with the given kurtosis.
        r2 = 0.0;
        zeta = k > 0.0 ? 3.0 / k : 1e3;
      }
      const double r = std::copysign(std::sqrt(r2), s);
      const double alpha = std::sqrt(zeta / v) / (1.0 - r2);
      const double beta = r * alpha;
      const double gamma = alpha * std::sqrt(1.0 - r2);
      const double deltaL = zeta / gamma;
      const double muL = mu - deltaL * beta / gamma;
      return SeedDistribution::nig(alpha, beta, deltaL / L, muL / L);
    }
    default:
      throw UnsupportedError("method of moments: unsupported seed " + family_name(structure.family()));
  }
}

template <class E>
[[noreturn]] void rethrow_at(const E& e, std::size_t i, int k) {
  throw E(std::string(e.what()) + " [pair i=" + std::to_string(i) + ", lag k=" + std::to_string(k) + "]");
}

}  // namespace

void FitConfig::validate() const {
  if (lags.empty()) throw DomainError("fit config: lag set is empty");
  for (int k : lags)
    if (k <= 0) throw DomainError("fit config: lags must be positive");
  if (n_samples < 100) throw DomainError("fit config: at least 100 samples per pair");
  if (cv_degree < 0 || cv_degree > 3) throw DomainError("fit config: control variate degree must be in 0..3");
  if (max_iter < 0) throw DomainError("fit config: max_iter must be nonnegative");
  if (!(grad_tol > 0.0)) throw DomainError("fit config: grad_tol must be positive");
  if (threads < 1) throw DomainError("fit config: threads must be positive");
}

std::vector<int> default_lags(const TrawlFunction& tf, double tau) {
  std::vector<int> out;
  for (int k : {1, 3, 5, 10, 15, 20, 30, 40})
    if (out.size() < 3 || acf(tf, k * tau) >= 0.01) out.push_back(k);
  return out;
}

PathMoments path_moments(std::span<const double> x, int max_lag) {
  const std::size_t n = x.size();
  if (n < 2) throw DomainError("path_moments: need at least two observations");
  PathMoments m;
  m.mean = std::accumulate(x.begin(), x.end(), 0.0) / double(n);
  double c2 = 0.0, c3 = 0.0, c4 = 0.0;
  for (double v : x) {
    const double d = v - m.mean;
    c2 += d * d;
    c3 += d * d * d;
    c4 += d * d * d * d;
  }
  m.var = c2 / double(n);
  m.m3 = c3 / double(n);
  m.m4 = c4 / double(n);
  for (int k = 1; k <= max_lag && std::size_t(k) < n; ++k) {
    double ck = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) ck += (x[i] - m.mean) * (x[i + k] - m.mean);
    m.acf.push_back(c2 > 0.0 ? ck / c2 : 0.0);
  }
  return m;
}

ModelSpec gmm_from_moments(const PathMoments& m, double tau, const ModelSpec& structure) {
  if (!(tau > 0.0)) throw DomainError("gmm: tau must be positive");
  if (m.acf.empty()) throw DomainError("gmm: no autocorrelations to match");
  const TrawlFunction tf = fit_acf(structure.trawl, tau, m.acf);
  const SeedDistribution seed = seed_from_moments(structure.seed, m, total_area(tf));
  return ModelSpec{seed, tf};
}

ModelSpec gmm_fit(std::span<const double> path, double tau, const ModelSpec& structure, int max_lag) {
  if (path.size() < 50) throw DomainError("gmm: the path needs at least 50 observations");
  if (max_lag <= 0) {
    // Lags up to the first drop of the empirical acf below 0.05.
    const int cap = static_cast<int>(std::min<std::size_t>(40, path.size() / 5));
    const auto pm = path_moments(path, cap);
    max_lag = 3;
    while (max_lag < cap && pm.acf[max_lag] >= 0.05) ++max_lag;
  }
  return gmm_from_moments(path_moments(path, max_lag), tau, structure);
}

PlObjective::PlObjective(std::vector<double> path, double tau, ModelSpec structure, FitConfig config)
    : path_(std::move(path)), tau_(tau), structure_(std::move(structure)), cfg_(std::move(config)) {
  cfg_.validate();
  if (!(tau_ > 0.0)) throw DomainError("pl objective: tau must be positive");
  if (path_.size() < 2) throw DomainError("pl objective: the path needs at least two observations");
  lag_n_.assign(cfg_.lags.size(), cfg_.n_samples);
}

std::size_t PlObjective::pairs() const {
  std::size_t s = 0;
  for (int k : cfg_.lags)
    if (std::size_t(k) < path_.size()) s += path_.size() - k;
  return s;
}

PlValue PlObjective::operator()(std::span<const double> theta) const {
  const ModelSpec model = structure_.with_theta(theta);
  const std::size_t n = path_.size();
  const int dim = model.size();
  const PairMethod method = resolve_method(cfg_.method, model.seed);

  struct Job {
    std::size_t i;
    int lag_index;
  };
  std::vector<Job> jobs;
  for (std::size_t li = 0; li < cfg_.lags.size(); ++li) {
    const int k = cfg_.lags[li];
    for (std::size_t i = 0; i + k < n; ++i) jobs.push_back({i, static_cast<int>(li)});
  }

  // Base uniforms and mixing draws shared by all pairs at a lag.
  const bool shareable = (method == PairMethod::PG || method == PairMethod::SF) && pair_mixing_law_shared(model);
  std::vector<BaseSamples> lag_base(cfg_.lags.size());
  std::vector<Draws> lag_draws(cfg_.lags.size());
  if (shareable) {
    const Estimator kind = method == PairMethod::PG ? Estimator::PG : Estimator::SF;
    parallel_for(cfg_.lags.size(), cfg_.threads, [&](std::size_t li) {
      const int k = cfg_.lags[li];
      if (std::size_t(k) >= n) return;
      Rng rng(derive_seed(cfg_.seed, {std::uint64_t(k)}));
      lag_base[li] = draw_base(lag_n_[li], rng);
      lag_draws[li] = make_draws(kind, pair_mixing_law(model, k * tau_), lag_base[li]);
    });
  }

  std::vector<PairEstimate> out(jobs.size());
  std::vector<char> fell_back(jobs.size(), 0);
  parallel_for(jobs.size(), cfg_.threads, [&](std::size_t j) {
    const Job& job = jobs[j];
    const int k = cfg_.lags[job.lag_index];
    PairContext ctx{path_[job.i], path_[job.i + k], k * tau_, model};
    PairOptions po;
    po.method = method;
    po.n = lag_n_[job.lag_index];
    po.cv_degree = cfg_.cv_degree;
    try {
      if (method == PairMethod::Exact) {
        out[j] = pairwise_logdensity_discrete(ctx);
        return;
      }
      BaseSamples own;
      const BaseSamples* base = &lag_base[job.lag_index];
      const Draws* shared = shareable ? &lag_draws[job.lag_index] : nullptr;
      if (!shareable) {
        Rng rng(derive_seed(cfg_.seed, {std::uint64_t(k), job.i}));
        own = draw_base(po.n, rng);
        base = &own;
      }
      try {
        out[j] = pairwise_logdensity_and_grad(ctx, po, *base, shared);
      } catch (const EstimationError&) {
        if (po.cv_degree == 0) throw;
        po.cv_degree = 0;
        fell_back[j] = 1;
        out[j] = pairwise_logdensity_and_grad(ctx, po, *base, shared);
      }
    } catch (const DomainError& e) {
      rethrow_at(e, job.i, k);
    } catch (const UnsupportedError& e) {
      rethrow_at(e, job.i, k);
    } catch (const EstimationError& e) {
      rethrow_at(e, job.i, k);
    } catch (const ConvergenceError& e) {
      rethrow_at(e, job.i, k);
    }
  });

  PlValue v;
  v.grad.assign(dim, 0.0);
  v.grad_se.assign(dim, 0.0);
  v.pairs = jobs.size();
  // Pairs sharing draws are correlated: their standard errors add within a
  // lag (an upper bound), and lags combine in quadrature.
  double var = 0.0;
  std::vector<double> gvar(dim, 0.0);
  std::size_t j = 0;
  for (std::size_t li = 0; li < cfg_.lags.size(); ++li) {
    double se = 0.0;
    std::vector<double> gse(dim, 0.0);
    for (; j < jobs.size() && jobs[j].lag_index == static_cast<int>(li); ++j) {
      const PairEstimate& e = out[j];
      v.value += e.log_density;
      for (int d = 0; d < dim; ++d) v.grad[d] += e.grad[d];
      v.cv_fallbacks += fell_back[j];
      if (shareable) {
        se += e.log_se;
        for (int d = 0; d < dim; ++d) gse[d] += e.grad_se[d];
      } else {
        var += e.log_se * e.log_se;
        for (int d = 0; d < dim; ++d) gvar[d] += e.grad_se[d] * e.grad_se[d];
      }
    }
    var += se * se;
    for (int d = 0; d < dim; ++d) gvar[d] += gse[d] * gse[d];
  }
  v.value_se = std::sqrt(var);
  for (int d = 0; d < dim; ++d) v.grad_se[d] = std::sqrt(gvar[d]);
  return v;
}

void PlObjective::calibrate(std::span<const double> theta) {
  const ModelSpec model = structure_.with_theta(theta);
  const PairMethod method = resolve_method(cfg_.method, model.seed);
  if (method == PairMethod::Exact) return;
  const std::size_t n = path_.size();
  std::fill(lag_n_.begin(), lag_n_.end(), cfg_.n_samples);
  for (std::size_t li = 0; li < cfg_.lags.size(); ++li) {
    const int k = cfg_.lags[li];
    if (std::size_t(k) >= n) continue;
    std::vector<double> rel(n - k, 0.0);
    parallel_for(n - k, cfg_.threads, [&](std::size_t i) {
      PairContext ctx{path_[i], path_[i + k], k * tau_, model};
      PairOptions po;
      po.method = method;
      po.n = cfg_.n_samples;
      Rng rng(derive_seed(cfg_.seed, {std::uint64_t(k), i, 1}));
      try {
        const auto e = pairwise_logdensity_and_grad(ctx, po, draw_base(po.n, rng), nullptr);
        rel[i] = e.log_se * e.log_se;
      } catch (const EstimationError&) {
        rel[i] = kInf;
      }
    });
    const double worst = *std::max_element(rel.begin(), rel.end());
    const double want = std::ceil(1.1 * double(cfg_.n_samples) * worst / cfg_.target_rel_var);
    lag_n_[li] = std::clamp<std::size_t>(std::isfinite(want) ? static_cast<std::size_t>(want) : cfg_.max_samples,
                                         cfg_.n_samples, std::max(cfg_.max_samples, cfg_.n_samples));
  }
}

PlValue pl_objective(std::span<const double> path, double tau, const ModelSpec& model, const FitConfig& config) {
  PlObjective obj(std::vector<double>(path.begin(), path.end()), tau, model, config);
  const auto th = model.theta();
  if (config.adaptive) obj.calibrate(th);
  return obj(th);
}

FitResult pl_fit(std::span<const double> path, double tau, const ModelSpec& structure, const FitConfig& config,
                 const std::optional<ModelSpec>& init) {
  const auto t0 = std::chrono::steady_clock::now();
  config.validate();
  const ModelSpec start = init ? *init : gmm_fit(path, tau, structure);
  FitResult r{start, start, {}, {}, 0.0, 0, false, false, {}, {}, 0};
  const ModelSpec& m0 = r.init;
  PlObjective obj(std::vector<double>(path.begin(), path.end()), tau, m0, config);
  const std::vector<double> th0 = m0.theta();
  if (config.adaptive) obj.calibrate(th0);
  const double P = double(std::max<std::size_t>(obj.pairs(), 1));
  std::size_t fallbacks = 0;

  auto to_theta = [&](const std::vector<double>& x) {
    return config.log_space ? from_unconstrained(m0, x) : x;
  };
  Objective f = [&](const std::vector<double>& x, std::vector<double>& g) {
    std::vector<double> th;
    PlValue v;
    try {
      th = to_theta(x);
      v = obj(th);
    } catch (const DomainError&) {
      return kInf;
    }
    if (!std::isfinite(v.value)) return kInf;
    fallbacks = std::max(fallbacks, v.cv_fallbacks);
    g.resize(x.size());
    const auto jac = config.log_space ? unconstrained_jacobian(m0, x) : std::vector<double>(x.size(), 1.0);
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = -v.grad[i] * jac[i] / P;
    return -v.value / P;
  };
  OptimizeOptions oo;
  oo.kind = config.optimizer;
  oo.max_iter = config.max_iter;
  oo.grad_tol = config.grad_tol;
  if (!config.log_space) oo.max_step = 0.5;
  const std::vector<double> x0 = config.log_space ? to_unconstrained(m0, th0) : th0;
  const OptimizeResult o = minimize(f, x0, oo);
  r.model = m0.with_theta(to_theta(o.x));
  r.objective_trace = o.value_trace;
  r.grad_norm_trace = o.grad_norm_trace;
  r.iterations = o.iterations;
  r.converged = o.converged;
  r.fallback_used = o.fallback_used;
  r.message = o.message;
  r.lag_samples = obj.lag_samples();
  r.cv_fallbacks = fallbacks;
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

double kl_divergence(const SeedDistribution& p, const SeedDistribution& q) {
  if (p.family() != q.family()) throw DomainError("kl_divergence: laws must share a family");
  if (p.discrete()) {
    const double m = mean(p), sd = std::sqrt(variance(p));
    const double lo = p.family() == Family::Skellam ? std::floor(m - 40.0 * sd - 40.0) : 0.0;
    const double hi = std::ceil(m + 40.0 * sd + 40.0);
    double s = 0.0;
    for (double k = lo; k <= hi; k += 1.0) {
      const double lp = log_density(p, k);
      if (!std::isfinite(lp)) continue;
      const double lq = log_density(q, k);
      if (!std::isfinite(lq)) return kInf;
      s += std::exp(lp) * (lp - lq);
    }
    return std::max(s, 0.0);
  }
  bool infinite = false;
  auto g = [&](double x) {
    const double lp = log_density(p, x);
    if (!std::isfinite(lp)) return 0.0;
    const double lq = log_density(q, x);
    if (!std::isfinite(lq)) {
      infinite = true;
      return 0.0;
    }
    return std::exp(lp) * (lp - lq);
  };
  QuadOptions o;
  o.rel_tol = 1e-10;
  o.abs_tol = 1e-14;
  double s = 0.0;
  const double m = mean(p);
  if (is_positive_support(p.family())) {
    s = integrate(g, 0.0, m, o).value + integrate(g, m, kInf, o).value;
  } else {
    s = integrate(g, -kInf, m, o).value + integrate(g, m, kInf, o).value;
  }
  if (infinite) return kInf;
  return std::max(s, 0.0);
}

AcfDistance acf_distance(const TrawlFunction& a, const TrawlFunction& b, double k) {
  auto w = [&](double t) { return 1.0 / (1.0 + k * t * t); };
  double T = 1.0;
  while (w(T) * std::max(acf(a, T), acf(b, T)) >= 1e-6 && T < 1e9) T *= 2.0;
  QuadOptions o;
  o.rel_tol = 1e-9;
  o.abs_tol = 1e-13;
  AcfDistance d;
  double l1 = 0.0, l2 = 0.0;
  // Doubling panels keep the adaptive rule on scales where the acf varies.
  for (double lo = 0.0, hi = 1.0; lo < T; lo = hi, hi *= 2.0) {
    l1 += integrate([&](double t) { return w(t) * std::abs(acf(a, t) - acf(b, t)); }, lo, hi, o).value;
    l2 += integrate([&](double t) {
            const double e = acf(a, t) - acf(b, t);
            return w(t) * e * e;
          }, lo, hi, o).value;
  }
  d.l1 = l1;
  d.l2 = std::sqrt(l2);
  return d;
}

MetricsReport eval_metrics(std::span<const ModelSpec> est, const ModelSpec& truth) {
  if (est.empty()) throw DomainError("eval_metrics: no estimates");
  MetricsReport r;
  r.names = truth.param_names();
  const auto th = truth.theta();
  const std::size_t d = th.size();
  r.rmse.assign(d, 0.0);
  r.mae.assign(d, 0.0);
  r.medae.assign(d, 0.0);
  std::vector<std::vector<double>> abs_err(d);
  std::vector<double> kl, l1, l2;
  const SeedDistribution marg = truth.marginal();
  for (const ModelSpec& e : est) {
    const auto t = e.theta();
    if (t.size() != d) throw DomainError("eval_metrics: estimate and truth differ in structure");
    for (std::size_t j = 0; j < d; ++j) {
      const double err = t[j] - th[j];
      r.rmse[j] += err * err;
      r.mae[j] += std::abs(err);
      abs_err[j].push_back(std::abs(err));
    }
    kl.push_back(kl_divergence(marg, e.marginal()));
    const auto ad = acf_distance(truth.trawl, e.trawl);
    l1.push_back(ad.l1);
    l2.push_back(ad.l2);
  }
  const double n = double(est.size());
  for (std::size_t j = 0; j < d; ++j) {
    r.rmse[j] = std::sqrt(r.rmse[j] / n);
    r.mae[j] /= n;
    r.medae[j] = median(abs_err[j]);
  }
  r.kl_mean = std::accumulate(kl.begin(), kl.end(), 0.0) / n;
  r.kl_median = median(kl);
  r.acf_l1_mean = std::accumulate(l1.begin(), l1.end(), 0.0) / n;
  r.acf_l2_mean = std::accumulate(l2.begin(), l2.end(), 0.0) / n;
  r.acf_l1_median = median(l1);
  r.acf_l2_median = median(l2);
  return r;
}

}  // namespace trawl
