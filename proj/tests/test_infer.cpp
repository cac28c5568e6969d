#include <catch_amalgamated.hpp>

#include <chrono>
#include <cmath>
#include <numbers>
#include <vector>

#include "trawl/error.hpp"
#include "trawl/infer.hpp"
#include "trawl/optimize.hpp"
#include "trawl/simulate.hpp"

using namespace trawl;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ModelSpec gamma_exp() { return ModelSpec{SeedDistribution::gamma(3.0, 0.75), TrawlFunction::exponential(0.25)}; }

// Exact moments of X_t and its autocorrelations at lags 1..K.
PathMoments exact_moments(const ModelSpec& m, double tau, int K) {
  const SeedDistribution x = m.marginal();
  PathMoments pm;
  pm.mean = mean(x);
  double c[5] = {};
  for (int l = 2; l <= 4; ++l) c[l] = shifted_moment(x, l, pm.mean);
  pm.var = c[2];
  pm.m3 = c[3];
  pm.m4 = c[4];
  for (int k = 1; k <= K; ++k) pm.acf.push_back(acf(m.trawl, k * tau));
  return pm;
}

double gaussian_pair_logpdf(const ModelSpec& m, double xs, double xt, double h) {
  const double L = m.area();
  const double v = m.seed[1] * m.seed[1] * L, c = v * acf(m.trawl, h);
  const double a = xs - m.seed[0] * L, b = xt - m.seed[0] * L;
  const double det = v * v - c * c;
  return -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(det) - 0.5 * (v * a * a - 2.0 * c * a * b + v * b * b) / det;
}

}  // namespace

TEST_CASE("quasi-Newton and gradient descent", "[optimize]") {
  Objective rosen = [](const std::vector<double>& x, std::vector<double>& g) {
    g = {-2.0 * (1.0 - x[0]) - 400.0 * x[0] * (x[1] - x[0] * x[0]), 200.0 * (x[1] - x[0] * x[0])};
    return (1.0 - x[0]) * (1.0 - x[0]) + 100.0 * std::pow(x[1] - x[0] * x[0], 2);
  };
  OptimizeOptions o;
  o.max_iter = 500;
  o.grad_tol = 1e-8;
  const auto r = minimize(rosen, {-1.2, 1.0}, o);
  CHECK(r.converged);
  CHECK_THAT(r.x[0], WithinAbs(1.0, 1e-6));
  CHECK_THAT(r.x[1], WithinAbs(1.0, 1e-6));
  for (std::size_t i = 1; i < r.value_trace.size(); ++i) CHECK(r.value_trace[i] <= r.value_trace[i - 1]);

  Objective quad = [](const std::vector<double>& x, std::vector<double>& g) {
    g = {2.0 * (x[0] - 3.0), 8.0 * (x[1] + 1.0)};
    return (x[0] - 3.0) * (x[0] - 3.0) + 4.0 * (x[1] + 1.0) * (x[1] + 1.0);
  };
  o.kind = OptimizerKind::GradientDescent;
  o.max_iter = 5000;
  o.grad_tol = 1e-6;
  const auto gd = minimize(quad, {0.0, 0.0}, o);
  CHECK_THAT(gd.x[0], WithinAbs(3.0, 1e-5));
  CHECK_THAT(gd.x[1], WithinAbs(-1.0, 1e-5));

  // Infeasible region to the right of 0.5: the line search backs off.
  Objective wall = [](const std::vector<double>& x, std::vector<double>& g) {
    if (x[0] > 0.5) return std::numeric_limits<double>::infinity();
    g = {2.0 * (x[0] - 2.0)};
    return (x[0] - 2.0) * (x[0] - 2.0);
  };
  o.kind = OptimizerKind::QuasiNewton;
  o.max_iter = 50;
  const auto w = minimize(wall, {0.0}, o);
  CHECK(w.x[0] <= 0.5);
  CHECK(w.x[0] > 0.45);
  CHECK_THROWS_AS(minimize(wall, {1.0}, o), DivergenceError);
}

TEST_CASE("method of moments recovers parameters from exact moments", "[infer][gmm]") {
  const double tau = 0.5;
  const std::vector<ModelSpec> models = {
      gamma_exp(),
      {SeedDistribution::gaussian(0.7, 1.3), TrawlFunction::gamma(1.5, 0.8)},
      {SeedDistribution::inv_gaussian(1.2, 2.5), TrawlFunction::inv_gaussian(0.9, 1.7)},
      {SeedDistribution::poisson(2.2), TrawlFunction::exponential(0.6)},
      {SeedDistribution::negbinomial(1.5, 0.4), TrawlFunction::exponential(0.3)},
      {SeedDistribution::skellam(1.4, 0.6), TrawlFunction::gamma(2.0, 1.2)},
      {SeedDistribution::nig(2.0, 0.6, 1.1, 0.3), TrawlFunction::exponential(0.8)},
      {SeedDistribution::gamma(2.0, 1.5), TrawlFunction::sup_exponential({0.3, 0.7}, {0.2, 1.5})},
  };
  for (const auto& m : models) {
    INFO(family_name(m.seed.family()) << " / " << trawl_name(m.trawl.kind()));
    const auto est = gmm_from_moments(exact_moments(m, tau, 20), tau, m);
    const auto a = m.theta(), b = est.theta();
    for (std::size_t j = 0; j < a.size(); ++j) CHECK_THAT(b[j], WithinAbs(a[j], 1e-6 * std::max(1.0, std::abs(a[j]))));
  }
  PathMoments bad;
  bad.mean = 1.0;
  bad.var = 0.0;
  bad.acf = {0.5};
  CHECK_THROWS_AS(gmm_from_moments(bad, 1.0, gamma_exp()), DomainError);
}

TEST_CASE("method of moments on simulated paths", "[infer][gmm]") {
  const auto truth = gamma_exp();
  int hits = 0;
  for (int r = 0; r < 50; ++r) {
    const auto x = simulate(truth, 2000, 1.0, 1000 + r);
    const auto est = gmm_fit(x, 1.0, truth);
    if (std::abs(est.trawl[0] - 0.25) <= 0.1) ++hits;
  }
  INFO(hits << " of 50");
  CHECK(hits >= 45);

  const ModelSpec g{SeedDistribution::gaussian(0.5, 2.0), TrawlFunction::exponential(0.4)};
  const auto x = simulate(g, 500, 1.0, 7);
  const auto est = gmm_fit(x, 1.0, g);
  const auto pm = path_moments(x, 1);
  const double L = est.area();
  CHECK_THAT(est.seed[0], WithinRel(pm.mean / L, 1e-12));
  CHECK_THAT(est.seed[1], WithinRel(std::sqrt(pm.var / L), 1e-12));
  CHECK_THROWS_AS(gmm_fit(std::vector<double>(49, 1.0), 1.0, g), DomainError);
}

TEST_CASE("pairwise likelihood of a single pair", "[infer][pl]") {
  const auto m = gamma_exp();
  const std::vector<double> x = {14.0, 17.5};
  FitConfig c;
  c.lags = {1};
  c.n_samples = 2000;
  c.seed = 3;
  const auto v = pl_objective(x, 1.0, m, c);
  CHECK(v.pairs == 1);
  Rng rng(derive_seed(3, {1}));
  PairOptions o;
  o.n = 2000;
  const auto e = pairwise_logdensity_and_grad(PairContext{14.0, 17.5, 1.0, m}, o, rng);
  CHECK(v.value == e.log_density);
  CHECK(v.grad == e.grad);
}

TEST_CASE("Gaussian pairwise likelihood against the closed form", "[infer][pl]") {
  const ModelSpec m{SeedDistribution::gaussian(0.3, 1.2), TrawlFunction::exponential(0.5)};
  const auto x = simulate(m, 120, 0.5, 11);
  FitConfig c;
  c.lags = {1, 2, 4};
  c.n_samples = 2000;
  c.seed = 5;
  c.threads = 4;
  const auto v = pl_objective(x, 0.5, m, c);
  double exact = 0.0;
  for (int k : c.lags)
    for (std::size_t i = 0; i + k < x.size(); ++i) exact += gaussian_pair_logpdf(m, x[i], x[i + k], k * 0.5);
  INFO(v.value << " vs " << exact << " se " << v.value_se);
  CHECK(std::abs(v.value - exact) <= 3.0 * v.value_se);
  CHECK(v.pairs == 119 + 118 + 116);

  // Thread count does not change the result.
  c.threads = 1;
  const auto v1 = pl_objective(x, 0.5, m, c);
  CHECK(v1.value == v.value);
  CHECK(v1.grad == v.grad);
}

TEST_CASE("pairwise likelihood gradient against finite differences", "[infer][pl]") {
  const auto m = gamma_exp();
  const auto x = simulate(m, 30, 1.0, 12);
  FitConfig c;
  c.lags = {1, 3};
  c.n_samples = 100000;
  c.seed = 8;
  c.threads = 4;
  PlObjective obj(x, 1.0, m, c);
  const auto th = m.theta();
  const auto v = obj(th);
  for (std::size_t j = 0; j < th.size(); ++j) {
    const double s = 1e-4 * th[j];
    auto tp = th, tm = th;
    tp[j] += s;
    tm[j] -= s;
    const double fd = (obj(tp).value - obj(tm).value) / (2.0 * s);
    INFO("parameter " << j);
    CHECK_THAT(v.grad[j], WithinRel(fd, 0.01));
  }
}

TEST_CASE("pairwise likelihood fit", "[infer][pl]") {
  const auto truth = gamma_exp();
  const auto x = simulate(truth, 300, 1.0, 21);
  FitConfig c;
  c.lags = {1, 3, 5};
  c.n_samples = 300;
  c.seed = 9;
  c.threads = 4;
  c.grad_tol = 1e-6;
  c.max_iter = 200;
  const auto a = pl_fit(x, 1.0, truth, c);
  CHECK(a.converged);
  CHECK(a.objective_trace.back() <= a.objective_trace.front());

  // Deterministic, and independent of the thread count.
  c.threads = 1;
  const auto b = pl_fit(x, 1.0, truth, c);
  CHECK(a.model.theta() == b.model.theta());

  // Restarting at the optimum stays there.
  const auto r = pl_fit(x, 1.0, truth, c, a.model);
  const auto ta = a.model.theta(), tr = r.model.theta();
  for (std::size_t j = 0; j < ta.size(); ++j) CHECK_THAT(tr[j], WithinRel(ta[j], 1e-4));

  // Same argmax in raw coordinates.
  c.log_space = false;
  c.grad_tol = 1e-7;
  const auto raw = pl_fit(x, 1.0, truth, c, a.init);
  const auto tw = raw.model.theta();
  for (std::size_t j = 0; j < ta.size(); ++j) CHECK_THAT(tw[j], WithinRel(ta[j], 1e-3));
}

TEST_CASE("adaptive sample sizes", "[infer][pl]") {
  const auto m = gamma_exp();
  const auto x = simulate(m, 40, 1.0, 13);
  FitConfig c;
  c.lags = {1, 5};
  c.n_samples = 100;
  c.adaptive = true;
  c.target_rel_var = 1e-3;
  c.max_samples = 20000;
  PlObjective obj(x, 1.0, m, c);
  obj.calibrate(m.theta());
  for (std::size_t n : obj.lag_samples()) CHECK(n > 100);
  for (std::size_t n : obj.lag_samples()) CHECK(n <= 20000);
}

TEST_CASE("evaluation metrics", "[infer][metrics]") {
  const auto truth = gamma_exp();
  const std::vector<ModelSpec> same = {truth};
  const auto r0 = eval_metrics(same, truth);
  for (double v : r0.rmse) CHECK(v == 0.0);
  CHECK(r0.kl_mean == 0.0);
  CHECK(r0.acf_l2_mean == 0.0);

  // KL(Gamma(a1,b1) || Gamma(a2,b2)) = (a1-a2) psi(a1) - lgamma(a1) + lgamma(a2) + a2 log(b1/b2) + a1 (b2-b1)/b1
  const double kl = kl_divergence(SeedDistribution::gamma(2.0, 1.0), SeedDistribution::gamma(2.0, 2.0));
  CHECK_THAT(kl, WithinRel(2.0 - 2.0 * std::log(2.0), 1e-9));
  CHECK_THAT(kl_divergence(SeedDistribution::poisson(2.0), SeedDistribution::poisson(3.0)),
             WithinRel(2.0 * std::log(2.0 / 3.0) + 1.0, 1e-10));

  const auto d0 = acf_distance(TrawlFunction::exponential(0.3), TrawlFunction::exponential(0.3));
  CHECK(d0.l1 == 0.0);
  // For exponentials with k -> 0 the L1 distance tends to |1/a - 1/b|; with k = 0.01 it is a little less.
  const auto d1 = acf_distance(TrawlFunction::exponential(1.0), TrawlFunction::exponential(2.0));
  CHECK(d1.l1 < 0.5);
  // Reference values by an independent full-line quadrature; the cutoff at w rho < 1e-6 costs about 1e-7.
  CHECK_THAT(d1.l1, WithinRel(0.48434032351148876, 1e-6));
  CHECK_THAT(d1.l2, WithinRel(0.28645333065123185, 1e-6));

  const std::vector<ModelSpec> two = {truth.with_theta(std::vector<double>{3.5, 0.75, 0.25}),
                                      truth.with_theta(std::vector<double>{2.0, 0.75, 0.25})};
  const auto r2 = eval_metrics(two, truth);
  CHECK_THAT(r2.rmse[0], WithinRel(std::sqrt((0.25 + 1.0) / 2.0), 1e-14));
  CHECK_THAT(r2.mae[0], WithinRel(0.75, 1e-14));
  CHECK_THAT(r2.medae[0], WithinRel(0.75, 1e-14));
  CHECK(r2.rmse[1] == 0.0);
}
