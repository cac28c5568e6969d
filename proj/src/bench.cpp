#include "trawl/bench.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "trawl/error.hpp"
#include "trawl/optimize.hpp"
#include "trawl/pairwise.hpp"
#include "trawl/parallel.hpp"
#include "trawl/simulate.hpp"

namespace trawl {

namespace {

struct Pair {
  int lag;
  std::size_t i;
};

std::vector<Pair> pair_list(std::size_t n, const std::vector<int>& lags) {
  std::vector<Pair> out;
  for (int k : lags)
    for (std::size_t i = 0; i + k < n; ++i) out.push_back({k, i});
  return out;
}

// Draws of q; Beta laws are sampled as a ratio of Gamma variables.
std::vector<double> draw_mixing(const Distribution& q, std::size_t n, Rng& rng) {
  std::vector<double> z(n);
  const SeedDistribution& b = base_of(q);
  if (std::holds_alternative<SeedDistribution>(q) && b.family() == Family::Beta) {
    std::gamma_distribution<double> ga(b[0], 1.0), gb(b[1], 1.0);
    for (auto& v : z) {
      const double x = ga(rng.engine()), y = gb(rng.engine());
      v = x / (x + y);
      if (!(v > 0.0 && v < 1.0)) v = quantile(q, rng.uniform());
    }
    return z;
  }
  const BaseSamples base = draw_base(n, rng);
  for (std::size_t i = 0; i < n; ++i) z[i] = draw_value(q, base.row(i));
  return z;
}

Draws weights_at(Estimator kind, const Distribution& q, const std::vector<double>& z) {
  Draws d;
  d.kind = kind;
  d.n = z.size();
  d.z = z;
  const int nq = param_count(q);
  d.g.assign(nq, std::vector<double>(z.size(), 0.0));
  for (std::size_t i = 0; i < z.size(); ++i) {
    std::vector<double> g;
    if (kind == Estimator::SF) {
      g = log_density_gradient(q, z[i]);
    } else {
      const double dens = density(q, z[i]);
      if (!(dens > 0.0 && std::isfinite(dens))) continue;
      g = pathwise_gradient(q, z[i]);
    }
    for (int k = 0; k < nq; ++k) d.g[k][i] = g[k];
  }
  return d;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / double(v.size() - 1));
}

}  // namespace

std::vector<double> quadrature_pl_gradient(const std::vector<double>& path, double tau, const ModelSpec& model,
                                           const std::vector<int>& lags, int threads) {
  const auto pairs = pair_list(path.size(), lags);
  const auto th = model.theta();
  const int dim = model.size();
  std::vector<std::vector<double>> per(pairs.size(), std::vector<double>(dim, 0.0));
  parallel_for(pairs.size(), threads, [&](std::size_t j) {
    const Pair& p = pairs[j];
    for (int d = 0; d < dim; ++d) {
      const double step = 1e-4 * std::max(1.0, std::abs(th[d]));
      double lp[2];
      for (int s = 0; s < 2; ++s) {
        auto t = th;
        t[d] += s == 0 ? step : -step;
        const PairContext ctx{path[p.i], path[p.i + p.lag], p.lag * tau, model.with_theta(t)};
        lp[s] = std::log(pairwise_density_quadrature(ctx, 1e-11));
      }
      per[j][d] = (lp[0] - lp[1]) / (2.0 * step);
    }
  });
  std::vector<double> g(dim, 0.0);
  for (const auto& v : per)
    for (int d = 0; d < dim; ++d) g[d] += v[d];
  return g;
}

GradBenchResult grad_bench(const GradBenchConfig& cfg) {
  if (cfg.replicates < 2) throw DomainError("grad bench: need at least two replicates");
  if (cfg.truth.seed.discrete()) throw UnsupportedError("grad bench: needs a continuous seed");
  GradBenchResult res{cfg.truth, {}, {}, {}};
  const auto path = simulate(cfg.truth, cfg.n, cfg.tau, stream_seed(cfg.seed, "bench", "grad-path"));
  res.at = cfg.at_truth ? cfg.truth : gmm_fit(path, cfg.tau, cfg.truth);
  res.true_grad = quadrature_pl_gradient(path, cfg.tau, res.at, cfg.lags, cfg.threads);

  const auto pairs = pair_list(path.size(), cfg.lags);
  const int dim = res.at.size();
  std::vector<Estimator> kinds;
  if (cfg.score_function) kinds.push_back(Estimator::SF);
  kinds.push_back(Estimator::PG);
  const std::size_t nd = cfg.degrees.size();
  res.estimates.assign(kinds.size(), std::vector<std::vector<std::vector<double>>>(
                                         nd, std::vector<std::vector<double>>(cfg.replicates)));
  std::vector<Distribution> q;
  for (int k : cfg.lags) q.push_back(pair_mixing_law(res.at, k * cfg.tau));

  for (std::size_t r = 0; r < cfg.replicates; ++r) {
    const std::uint64_t root = stream_seed(cfg.seed, "bench", "grad", r);
    // per[j][e * nd + d] is the gradient of log p for pair j.
    std::vector<std::vector<std::vector<double>>> per(pairs.size());
    parallel_for(pairs.size(), cfg.threads, [&](std::size_t j) {
      const Pair& p = pairs[j];
      const std::size_t li = std::find(cfg.lags.begin(), cfg.lags.end(), p.lag) - cfg.lags.begin();
      Rng rng(derive_seed(root, {std::uint64_t(p.lag), p.i}));
      const auto z = draw_mixing(q[li], cfg.samples, rng);
      const PairContext ctx{path[p.i], path[p.i + p.lag], p.lag * cfg.tau, res.at};
      for (Estimator e : kinds) {
        const auto est = pairwise_degree_sweep(ctx, weights_at(e, q[li], z), cfg.degrees, cfg.pilot);
        for (const auto& x : est) per[j].push_back(x.grad);
      }
    });
    for (std::size_t e = 0; e < kinds.size(); ++e)
      for (std::size_t d = 0; d < nd; ++d) {
        std::vector<double> g(dim, 0.0);
        for (const auto& v : per)
          for (int c = 0; c < dim; ++c) g[c] += v[e * nd + d][c];
        res.estimates[e][d][r] = g;
      }
  }

  const auto names = res.at.param_names();
  for (std::size_t e = 0; e < kinds.size(); ++e)
    for (std::size_t d = 0; d < nd; ++d)
      for (int c = 0; c < dim; ++c) {
        std::vector<double> v, err, ae;
        for (const auto& g : res.estimates[e][d]) {
          v.push_back(g[c]);
          err.push_back(g[c] - res.true_grad[c]);
          ae.push_back(std::abs(g[c] - res.true_grad[c]));
        }
        double ms = 0.0;
        for (double x : err) ms += x * x;
        res.rows.push_back({estimator_name(kinds[e]), cfg.degrees[d], names[c], mean_of(err), sd_of(v), mean_of(ae),
                            sample_quantile(ae, 0.5), std::sqrt(ms / double(err.size()))});
      }
  return res;
}

CvBenchResult cv_bench(const CvBenchConfig& cfg) {
  CvBenchResult res;
  for (std::size_t p = 0; p < cfg.paths; ++p) {
    Rng prior(stream_seed(cfg.seed, "bench", "cv-prior", p));
    std::gamma_distribution<double> g64(6.0, 0.25), g44(4.0, 0.25);
    const double a = g64(prior.engine()), b = g64(prior.engine()), lam = g44(prior.engine());
    const ModelSpec truth{SeedDistribution::gamma(a, b), TrawlFunction::exponential(lam)};
    const auto path = simulate(truth, cfg.n, cfg.tau, stream_seed(cfg.seed, "bench", "cv-path", p));
    ModelSpec at = truth;
    try {
      at = gmm_fit(path, cfg.tau, truth);
    } catch (const std::exception&) {
    }
    res.truths.push_back(truth);
    res.at.push_back(at);

    const Distribution q = pair_mixing_law(at, cfg.tau);
    const int dim = at.size();
    const std::size_t np = path.size() - 1, nd = cfg.degrees.size();
    std::vector<std::vector<double>> rm(nd, std::vector<double>(np, 0.0));
    std::vector<std::vector<double>> rpg(dim, std::vector<double>(np, 0.0));
    const std::uint64_t root = stream_seed(cfg.seed, "bench", "cv", p);
    parallel_for(np, cfg.threads, [&](std::size_t i) {
      Rng rng(derive_seed(root, {i}));
      const auto z = draw_mixing(q, cfg.samples, rng);
      const PairContext ctx{path[i], path[i + 1], cfg.tau, at};
      const Draws pg = weights_at(Estimator::PG, q, z), sf = weights_at(Estimator::SF, q, z);
      const SampleSet sp = pair_samples_theta(ctx, pg, 0), ss = pair_samples_theta(ctx, sf, 0);
      for (int c = 0; c < dim; ++c) {
        std::vector<double> vp(sp.n), vs(ss.n);
        for (std::size_t k = 0; k < sp.n; ++k) {
          vp[k] = sp.a[c][k];
          vs[k] = ss.a[c][k];
        }
        const double d = sd_of(vs);
        rpg[c][i] = d > 0.0 ? sd_of(vp) / d : 1.0;
      }
      for (std::size_t d = 0; d < nd; ++d) {
        CvReport rep;
        pair_samples_theta(ctx, pg, cfg.degrees[d], &rep);
        rm[d][i] = std::sqrt(std::max(0.0, rep.residual_factor0));
      }
    });
    std::vector<double> med;
    for (std::size_t d = 0; d < nd; ++d) {
      for (double qq : cfg.quantiles) res.rows.push_back({p, "r^m", cfg.degrees[d], qq, sample_quantile(rm[d], qq)});
      med.push_back(sample_quantile(rm[d], 0.5));
    }
    res.median_ratio.push_back(med);
    const auto names = at.param_names();
    for (int c = 0; c < dim; ++c)
      for (double qq : cfg.quantiles) res.rows.push_back({p, "pg/sf:" + names[c], 0, qq, sample_quantile(rpg[c], qq)});
  }
  return res;
}

InferenceBenchResult inference_bench(const InferenceBenchConfig& cfg) {
  InferenceBenchResult res;
  res.names = cfg.truth.param_names();
  for (std::size_t r = 0; r < cfg.replicates; ++r) {
    const auto path = simulate(cfg.truth, cfg.n, cfg.tau, stream_seed(cfg.seed, "bench", "inference-path", r));
    const ModelSpec g = gmm_fit(path, cfg.tau, cfg.truth);
    FitConfig fc = cfg.fit;
    fc.seed = stream_seed(cfg.seed, "bench", "inference-fit", r);
    res.gmm.push_back(g);
    try {
      const FitResult f = pl_fit(path, cfg.tau, cfg.truth, fc, g);
      res.pl.push_back(f.model);
      res.pl_seconds.push_back(f.wall_time);
      res.pl_converged.push_back(f.converged);
    } catch (const ConvergenceError&) {
      res.pl.push_back(g);
      res.pl_seconds.push_back(0.0);
      res.pl_converged.push_back(false);
    }
  }
  res.gmm_metrics = eval_metrics(res.gmm, cfg.truth);
  res.pl_metrics = eval_metrics(res.pl, cfg.truth);
  for (std::size_t i = 0; i < res.names.size(); ++i)
    res.rmse_ratio.push_back(res.pl_metrics.rmse[i] / res.gmm_metrics.rmse[i]);
  return res;
}

ForecastBenchResult forecast_bench(const ForecastBenchConfig& cfg) {
  const double tau = cfg.forecast.tau;
  const auto path = simulate(cfg.truth, cfg.fit_length, tau, stream_seed(cfg.seed, "bench", "forecast-fit"));
  ForecastBenchResult res{gmm_fit(path, tau, cfg.truth), cfg.truth, {}};
  FitConfig fc = cfg.fit;
  fc.seed = stream_seed(cfg.seed, "bench", "forecast-pl");
  try {
    res.pl = pl_fit(path, tau, cfg.truth, fc, res.gmm).model;
  } catch (const ConvergenceError&) {
    res.pl = res.gmm;
  }
  ForecastOptions fo = cfg.forecast;
  fo.seed = stream_seed(cfg.seed, "bench", "forecast-paths");
  for (const auto& [m, label] : {std::pair{cfg.truth, "true"}, std::pair{res.gmm, "gmm"}, std::pair{res.pl, "pl"}}) {
    const auto rows = forecast_errors(m, cfg.truth, cfg.horizons, fo, label);
    res.rows.insert(res.rows.end(), rows.begin(), rows.end());
  }
  return res;
}

}  // namespace trawl
