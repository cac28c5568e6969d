// Acceptance suite: one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "trawl/bench.hpp"
#include "trawl/cli.hpp"
#include "trawl/config.hpp"
#include "trawl/error.hpp"
#include "trawl/forecast.hpp"
#include "trawl/infer.hpp"
#include "trawl/mcgrad.hpp"
#include "trawl/pairwise.hpp"
#include "trawl/problem.hpp"
#include "trawl/simulate.hpp"
#include "trawl/trawl_function.hpp"

using namespace trawl;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Log {
 public:
  void fail(const std::string& what) {
    ok_ = false;
    if (fails_++ < 8) s_ << (s_.tellp() > 0 ? "; " : "") << what;
  }
  void note(const std::string& what) { notes_ << (notes_.tellp() > 0 ? "; " : "") << what; }
  Outcome done() const {
    std::string d = notes_.str();
    if (!ok_) d = s_.str() + (fails_ > 8 ? " (+" + std::to_string(fails_ - 8) + " more)" : "") + " | " + d;
    return {ok_, d};
  }

 private:
  bool ok_ = true;
  int fails_ = 0;
  std::ostringstream s_, notes_;
};

std::string fmt(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.4g", v);
  return b;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Criterion 1 ---------------------------------------------------------------

double bivariate_normal(double x, double y, double mx, double my, double vx, double vy, double cxy) {
  const double det = vx * vy - cxy * cxy;
  const double dx = x - mx, dy = y - my;
  const double q = (vy * dx * dx - 2.0 * cxy * dx * dy + vx * dy * dy) / det;
  return std::exp(-0.5 * q) / (2.0 * std::numbers::pi * std::sqrt(det));
}

Outcome gaussian_pairwise() {
  const auto t0 = std::chrono::steady_clock::now();
  Log log;
  Rng rng(101);
  double worst_z = 0.0, worst_q = 0.0;
  for (int c = 0; c < 20; ++c) {
    const double mu = -1.0 + 2.0 * rng.uniform(), sigma = 0.5 + 1.5 * rng.uniform();
    const TrawlFunction tf = (c % 2 == 0) ? TrawlFunction::exponential(0.2 + 1.8 * rng.uniform())
                                          : TrawlFunction::gamma(0.5 + 2.0 * rng.uniform(), 0.5 + rng.uniform());
    const ModelSpec m{SeedDistribution::gaussian(mu, sigma), tf};
    const double h = 0.2 + 2.8 * rng.uniform();
    const SliceTriple sl = pair_slices(tf, h);
    const double area = sl.common + sl.left;
    const double mean = mu * area, var = sigma * sigma * area, cov = sigma * sigma * sl.common;
    const double xs = mean + std::sqrt(var) * (2.0 * rng.uniform() - 1.0);
    const double xt = mean + std::sqrt(var) * (2.0 * rng.uniform() - 1.0);
    const double exact = bivariate_normal(xs, xt, mean, mean, var, var, cov);
    const PairContext ctx{xs, xt, h, m};
    Rng mc_rng(derive_seed(102, {std::uint64_t(c)}));
    const PairEstimate e = pairwise_density_mc(ctx, 100000, mc_rng);
    const double z = std::abs(e.density - exact) / e.density_se;
    worst_z = std::max(worst_z, z);
    if (!(z <= 3.0)) log.fail("case " + std::to_string(c) + " MC z=" + fmt(z));
    const double q = pairwise_density_quadrature(ctx);
    const double rel = std::abs(q - exact) / exact;
    worst_q = std::max(worst_q, rel);
    if (!(rel <= 1e-8)) log.fail("case " + std::to_string(c) + " quadrature rel=" + fmt(rel));
  }
  const double secs = seconds_since(t0);
  if (secs >= 30.0) log.fail("runtime " + fmt(secs) + " s");
  log.note("max MC |z|=" + fmt(worst_z) + " (tol 3), max quadrature rel err=" + fmt(worst_q) + " (tol 1e-8), " +
           fmt(secs) + " s (limit 30)");
  return log.done();
}

// Criterion 2 ---------------------------------------------------------------

long double poisson_pmf(long double k, long double lam) {
  if (k < 0) return 0.0L;
  return std::exp(k * std::log(lam) - lam - std::lgamma(k + 1.0L));
}

Outcome discrete_exact() {
  Log log;
  Rng rng(201);
  double worst = 0.0;
  for (int c = 0; c < 50; ++c) {
    const double lam = 0.3 + 5.0 * rng.uniform();
    const TrawlFunction tf = TrawlFunction::exponential(0.2 + 1.8 * rng.uniform());
    const double h = 0.2 + 3.0 * rng.uniform();
    const int xs = static_cast<int>(rng.uniform() * 25.0), xt = static_cast<int>(rng.uniform() * 25.0);
    const SliceTriple sl = pair_slices(tf, h);
    long double s = 0.0L;
    for (int k = 0; k <= std::min(xs, xt); ++k)
      s += poisson_pmf(k, lam * sl.common) * poisson_pmf(xs - k, lam * sl.left) * poisson_pmf(xt - k, lam * sl.right);
    const double brute = static_cast<double>(s);
    const double v = pairwise_density_discrete({double(xs), double(xt), h, {SeedDistribution::poisson(lam), tf}});
    const double rel = std::abs(v - brute) / brute;
    worst = std::max(worst, rel);
    if (!(rel <= 1e-14)) log.fail("Poisson case " + std::to_string(c) + " rel=" + fmt(rel));
  }
  double worst_sk = 0.0;
  for (int c = 0; c < 20; ++c) {
    const ModelSpec m{SeedDistribution::skellam(0.3 + 4.0 * rng.uniform(), 0.3 + 4.0 * rng.uniform()),
                      TrawlFunction::exponential(0.2 + 1.8 * rng.uniform())};
    const double h = 0.2 + 3.0 * rng.uniform();
    const double xs = std::round(-10.0 + 20.0 * rng.uniform()), xt = std::round(-10.0 + 20.0 * rng.uniform());
    const PairContext ctx{xs, xt, h, m};
    const double a = pairwise_density_discrete(ctx, 1e-14), b = pairwise_density_discrete(ctx, 0.5e-14);
    const double rel = std::abs(a - b) / a;
    worst_sk = std::max(worst_sk, rel);
    if (!(rel < 1e-10)) log.fail("Skellam case " + std::to_string(c) + " rel change=" + fmt(rel));
  }
  log.note("max Poisson rel err=" + fmt(worst) + " (tol 1e-14), max Skellam change on halving=" + fmt(worst_sk) +
           " (tol 1e-10)");
  return log.done();
}

// Criterion 3 ---------------------------------------------------------------

Outcome pathwise_gradients() {
  Log log;
  Rng rng(301);
  double worst_gauss = 0.0;
  for (int c = 0; c < 20; ++c) {
    const double mu = -2.0 + 4.0 * rng.uniform(), sigma = 0.3 + 2.0 * rng.uniform();
    const double z = mu + sigma * rng.normal();
    const auto g = pathwise_gradient(Distribution(SeedDistribution::gaussian(mu, sigma)), z);
    const double e0 = std::abs(g[0] - 1.0), e1 = std::abs(g[1] - (z - mu) / sigma);
    worst_gauss = std::max({worst_gauss, e0, e1});
    if (!(e0 <= 1e-12 && e1 <= 1e-12 * std::max(1.0, std::abs(z - mu) / sigma)))
      log.fail("Gaussian case " + std::to_string(c));
  }
  const std::vector<Distribution> laws = {SeedDistribution::gamma(0.8, 2.2),
                                          SeedDistribution::gamma(6.0, 1.75),
                                          SeedDistribution::beta(1.3, 0.6),
                                          SeedDistribution::beta(4.0, 2.5),
                                          SeedDistribution::inv_gaussian(1.2, 3.0),
                                          SeedDistribution::inv_gaussian(0.5, 0.8),
                                          TruncatedSeed(SeedDistribution::gamma(1.5, 0.7), 2.0),
                                          TruncatedSeed(SeedDistribution::gamma(3.0, 2.0), 0.8)};
  double worst = 0.0;
  for (const auto& d : laws) {
    const SeedDistribution& s = base_of(d);
    for (int rep = 0; rep < 10; ++rep) {
      const double u = 0.02 + 0.96 * rng.uniform();
      const double z = quantile(d, u);
      const auto g = pathwise_gradient(d, z);
      for (int j = 0; j < s.size(); ++j) {
        auto shifted = [&](double dh) {
          auto pv = s.param_vector();
          pv[j] += dh;
          SeedDistribution b(s.family(), pv);
          if (auto* t = std::get_if<TruncatedSeed>(&d)) return quantile(Distribution(TruncatedSeed(b, t->upper)), u);
          return quantile(Distribution(b), u);
        };
        const double h = 1e-5 * std::max(1.0, std::abs(s[j]));
        const double fd = (shifted(h) - shifted(-h)) / (2.0 * h);
        const double err = std::abs(g[j] - fd) / std::max(1.0, std::abs(fd));
        worst = std::max(worst, err);
        if (!(err <= 1e-5))
          log.fail(family_name(s.family()) + " param " + std::to_string(j) + " u=" + fmt(u) + " err=" + fmt(err));
      }
    }
  }
  log.note("Gaussian max abs err=" + fmt(worst_gauss) + ", generic vs quantile FD max err=" + fmt(worst) +
           " (tol 1e-5)");
  return log.done();
}

// Criterion 4 ---------------------------------------------------------------

Outcome log_pl_gradient() {
  const auto t0 = std::chrono::steady_clock::now();
  Log log;
  const ModelSpec truth{SeedDistribution::gamma(3.0, 0.75), TrawlFunction::exponential(0.25)};
  const auto path = simulate(truth, 40, 1.0, 401);
  FitConfig fc;
  fc.lags = {1, 3};
  fc.n_samples = 100000;
  fc.cv_degree = 2;
  fc.method = PairMethod::PG;
  fc.seed = 402;
  const PlObjective obj(path, 1.0, truth, fc);
  const auto th = truth.theta();
  const PlValue v = obj(th);
  const auto names = truth.param_names();
  std::string d;
  for (std::size_t j = 0; j < th.size(); ++j) {
    const double h = 1e-5 * std::max(1.0, std::abs(th[j]));
    auto tp = th, tm = th;
    tp[j] += h;
    tm[j] -= h;
    const double fd = (obj(tp).value - obj(tm).value) / (2.0 * h);
    const double rel = std::abs(v.grad[j] - fd) / std::abs(fd);
    d += names[j] + ": PG " + fmt(v.grad[j]) + " FD " + fmt(fd) + " rel " + fmt(rel) + "; ";
    if (!(rel <= 0.01)) log.fail(names[j] + " rel=" + fmt(rel));
  }
  const double secs = seconds_since(t0);
  if (secs >= 120.0) log.fail("runtime " + fmt(secs) + " s");
  log.note(d + std::to_string(v.pairs) + " pairs, tol 1%, " + fmt(secs) + " s (limit 120)");
  return log.done();
}

// Criterion 5 ---------------------------------------------------------------

Outcome gradient_benchmark() {
  const auto t0 = std::chrono::steady_clock::now();
  Log log;
  GradBenchConfig g;
  g.replicates = 30;
  g.degrees = {0, 2};
  g.score_function = true;
  g.seed = 0;
  const auto r = grad_bench(g);
  auto row = [&](const std::string& est, int m, const std::string& p) -> const GradBenchRow& {
    for (const auto& x : r.rows)
      if (x.estimator == est && x.degree == m && x.parameter == p) return x;
    throw std::runtime_error("missing bench row " + est + " " + p);
  };
  const auto names = r.at.param_names();
  for (const std::string& p : {names[2], names[3]}) {
    const double ratio = row(estimator_name(Estimator::PG), 0, p).sd / row(estimator_name(Estimator::SF), 0, p).sd;
    log.note("m=0 sd(PG)/sd(SF) " + p + "=" + fmt(ratio));
    if (!(ratio <= 1.0 / 3.0)) log.fail("m=0 sd ratio " + p + "=" + fmt(ratio));
  }
  for (const auto& p : names) {
    const auto& x = row(estimator_name(Estimator::PG), 2, p);
    log.note("m=2 PG bias " + p + "=" + fmt(x.bias) + " (sd " + fmt(x.sd) + ")");
    if (!(std::abs(x.bias) <= 0.5)) log.fail("m=2 |bias| " + p + "=" + fmt(std::abs(x.bias)));
  }
  log.note("30 replicates, bias tol 0.5, ratio tol 1/3, " + fmt(seconds_since(t0)) + " s");
  return log.done();
}

// Criterion 6 ---------------------------------------------------------------

Outcome control_variates() {
  const auto t0 = std::chrono::steady_clock::now();
  Log log;
  CvBenchConfig c;
  c.paths = 1;
  c.n = 750;
  c.tau = 0.5;
  c.degrees = {1, 3};
  c.seed = 0;
  const auto r = cv_bench(c);
  const double r1 = r.median_ratio[0][0], r3 = r.median_ratio[0][1];
  if (!(r1 < 0.5)) log.fail("median r^1=" + fmt(r1));
  if (!(r3 < 0.2)) log.fail("median r^3=" + fmt(r3));
  const double secs = seconds_since(t0);
  if (secs >= 120.0) log.fail("runtime " + fmt(secs) + " s");
  log.note("median r^1=" + fmt(r1) + " (tol 0.5), median r^3=" + fmt(r3) + " (tol 0.2), " + fmt(secs) +
           " s (limit 120)");
  return log.done();
}

// Criterion 7 ---------------------------------------------------------------

Outcome forecast_check() {
  Log log;
  const std::vector<std::pair<ModelSpec, double>> cases = {
      {{SeedDistribution::gaussian(0.4, 1.5), TrawlFunction::gamma(1.5, 0.8)}, 2.0},
      {{SeedDistribution::gamma(3.0, 0.75), TrawlFunction::exponential(0.25)}, 10.0},
      {{SeedDistribution::poisson(3.0), TrawlFunction::exponential(0.5)}, 9.0}};
  Rng rng(701);
  double worst = 0.0;
  for (const auto& [m, x] : cases) {
    const double e = mean(m.marginal());
    for (double h : {0.5, 1.0, 5.0}) {
      const double rho = acf(m.trawl, h);
      const double target = rho * x + (1.0 - rho) * e;
      const auto s = conditional_sample(m, x, h, 100000, rng);
      double s1 = 0.0, s2 = 0.0;
      for (double v : s) s1 += v;
      const double mu = s1 / double(s.size());
      for (double v : s) s2 += (v - mu) * (v - mu);
      const double se = std::sqrt(s2 / double(s.size() - 1) / double(s.size()));
      const double z = std::abs(mu - target) / se;
      worst = std::max(worst, z);
      if (!(z <= 4.0)) log.fail(family_name(m.seed.family()) + " h=" + fmt(h) + " z=" + fmt(z));
    }
  }
  double worst_ex = 0.0;
  for (const auto& y : {SeedDistribution::gaussian(0.3, 1.1), SeedDistribution::gamma(0.7, 2.0),
                        SeedDistribution::poisson(1.3)}) {
    const auto c = exchangeability_check(y, 2, 3, 200000, rng);
    for (int j = 0; j < 3; ++j) {
      const double z = std::abs(c.mean[j]) / c.std_error[j];
      worst_ex = std::max(worst_ex, z);
      if (!(z <= 4.0)) log.fail("exchangeability " + family_name(y.family()) + " j=" + std::to_string(j));
    }
  }
  log.note("max conditional-mean |z|=" + fmt(worst) + ", max exchangeability |z|=" + fmt(worst_ex) + " (tol 4)");
  return log.done();
}

// Criterion 8 ---------------------------------------------------------------

Outcome pl_vs_gmm() {
  const auto t0 = std::chrono::steady_clock::now();
  Log log;
  InferenceBenchConfig c;
  c.replicates = 20;
  c.n = 500;
  c.seed = 0;
  const auto r = inference_bench(c);
  int better = 0;
  std::string d;
  for (std::size_t j = 0; j < r.names.size(); ++j) {
    if (r.rmse_ratio[j] < 1.0) ++better;
    d += r.names[j] + " " + fmt(r.rmse_ratio[j]) + "; ";
  }
  if (better < 2) log.fail(std::to_string(better) + " of 3 rMSE ratios below 1");
  const double secs = seconds_since(t0);
  if (secs >= 900.0) log.fail("runtime " + fmt(secs) + " s");
  log.note("PL/GMM rMSE ratio " + d + fmt(secs) + " s (limit 900)");
  return log.done();
}

// Criterion 9 ---------------------------------------------------------------

struct Case {
  std::string name;
  std::unique_ptr<Problem> problem;
  std::vector<std::pair<int, double>> analytic;  // component, exact gradient
  std::vector<double> eta_jacobian;               // optional map to model parameters
};

template <int D, class F>
Case kernel_case(std::string name, const Distribution& q, F f, std::vector<std::pair<int, double>> analytic = {}) {
  return {std::move(name), std::make_unique<KernelProblem<FunctionKernel<D, F>>>(make_problem<D>(q, f)),
          std::move(analytic), {}};
}

Outcome cross_consistency() {
  Log log;
  std::vector<Case> cases;
  auto f_z = [](const auto& z, const auto*) { return z; };
  auto f_z2 = [](const auto& z, const auto*) { return z * z; };
  auto f_smooth = [](const auto& z, const auto* th) { return exp(-0.3 * z) * th[0] + z * z * 0.1; };
  cases.push_back(kernel_case<2>("gaussian smooth", SeedDistribution::gaussian(0.5, 1.2), f_smooth));
  cases.push_back(kernel_case<2>("gamma log1p", SeedDistribution::gamma(2.0, 1.5),
                                 [](const auto& z, const auto* th) { return log1p(z) * th[1]; }));
  cases.push_back(kernel_case<2>("beta", SeedDistribution::beta(1.5, 2.5),
                                 [](const auto& z, const auto*) { return exp(2.0 * z); }));
  cases.push_back(kernel_case<2>("inverse gaussian", SeedDistribution::inv_gaussian(1.2, 3.0),
                                 [](const auto& z, const auto*) { return 1.0 / (1.0 + z); }));
  cases.push_back(kernel_case<2>("truncated gamma", TruncatedSeed(SeedDistribution::gamma(1.5, 0.7), 2.0),
                                 [](const auto& z, const auto*) { return z * z; }));
  cases.push_back(kernel_case<1>("poisson z", SeedDistribution::poisson(3.0), f_z, {{0, 1.0}}));
  cases.push_back(kernel_case<1>("poisson z^2", SeedDistribution::poisson(3.0), f_z2, {{0, 7.0}}));
  cases.push_back(kernel_case<2>("skellam z^2", SeedDistribution::skellam(1.0, 2.0), f_z2));
  cases.push_back(kernel_case<2>("negbinomial z", SeedDistribution::negbinomial(2.0, 0.5), f_z, {{1, 8.0}}));
  cases.push_back(kernel_case<2>("negbinomial z^2", SeedDistribution::negbinomial(3.0, 0.3), f_z2));
  {
    const ModelSpec m{SeedDistribution::gamma(3.0, 0.75), TrawlFunction::exponential(0.25)};
    PairProblem pp = make_pair_problem({4.0, 3.0, 1.0, m});
    cases.push_back({"gamma-exponential pair", std::move(pp.problem), {}, {}});
  }
  {
    const ModelSpec m{SeedDistribution::gaussian(0.4, 1.5), TrawlFunction::gamma(1.5, 0.8)};
    PairProblem pp = make_pair_problem({0.3, 1.1, 1.0, m});
    cases.push_back({"gaussian-gamma pair", std::move(pp.problem), {}, {}});
  }

  const std::size_t n = 100000;
  const Estimator all[] = {Estimator::SF, Estimator::PG, Estimator::MVG, Estimator::Hybrid, Estimator::FD};
  double worst = 0.0;
  std::ostringstream used;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const Problem& p = *cases[c].problem;
    const bool discrete = base_of(p.q()).discrete();
    std::vector<std::pair<std::string, GradEstimate>> est;
    for (std::size_t e = 0; e < std::size(all); ++e) {
      // Differences of a discrete law's quantile at fixed u are not a gradient estimator.
      if (all[e] == Estimator::FD && discrete) continue;
      Rng rng(derive_seed(901, {c, e}));
      try {
        est.emplace_back(estimator_name(all[e]), summarize_gradient(estimator_samples(all[e], p, draw_base(n, rng))));
      } catch (const UnsupportedError&) {
      }
    }
    used << cases[c].name << ":";
    for (const auto& [nm, g] : est) used << " " << nm;
    used << "; ";
    if (est.size() < 2 && cases[c].analytic.empty()) log.fail(cases[c].name + ": fewer than two estimators");
    for (std::size_t a = 0; a < est.size(); ++a)
      for (std::size_t b = a + 1; b < est.size(); ++b)
        for (int j = 0; j < p.dim(); ++j) {
          const auto& ga = est[a].second;
          const auto& gb = est[b].second;
          const double se = std::hypot(ga.std_error[j], gb.std_error[j]);
          const double z = std::abs(ga.value[j] - gb.value[j]) / std::max(se, 1e-300);
          if (se > 0.0) worst = std::max(worst, z);
          if (!(std::abs(ga.value[j] - gb.value[j]) <= 4.0 * se + 1e-12))
            log.fail(cases[c].name + " " + est[a].first + " vs " + est[b].first + " component " +
                     std::to_string(j) + " z=" + fmt(z));
        }
    for (const auto& [j, exact] : cases[c].analytic)
      for (const auto& [nm, g] : est) {
        const double z = std::abs(g.value[j] - exact) / std::max(g.std_error[j], 1e-300);
        if (g.std_error[j] > 0.0) worst = std::max(worst, z);
        if (!(std::abs(g.value[j] - exact) <= 4.0 * g.std_error[j] + 1e-12))
          log.fail(cases[c].name + " " + nm + " vs exact " + fmt(exact) + " z=" + fmt(z));
      }
  }
  log.note("max |z|=" + fmt(worst) + " (tol 4 joint se); " + used.str());
  return log.done();
}

// Criterion 10 --------------------------------------------------------------

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "trawl_cli");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// Concatenated contents of every regular file under dir, in path order.
std::string dir_bytes(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string s;
  for (const auto& f : files) s += fs::relative(f, dir).string() + "\n" + read_text_file(f.string());
  return s;
}

Outcome cli_reproducible() {
  Log log;
  const fs::path root = fs::temp_directory_path() / ("trawl_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(root);
  const fs::path cfg = root / "model.json";
  {
    std::ofstream(cfg) << R"({"levy_seed": {"family": "gamma", "params": [3, 0.75]},
      "trawl": {"kind": "exponential", "params": [0.25]}, "n": 300, "tau": 1.0, "seed": 5,
      "fit": {"lags": [1, 3], "n_samples": 200, "max_iter": 10}})";
  }
  const std::string data = (root / "path.csv").string();
  if (cli({"simulate", "--config", cfg.string(), "--out", data}).code != 0) log.fail("simulate for data failed");

  struct Cmd {
    std::string name;
    std::vector<std::string> args;
    bool dir_out;
  };
  const std::vector<Cmd> cmds = {
      {"simulate", {"simulate", "--config", cfg.string()}, false},
      {"fit gmm", {"fit", data, "--config", cfg.string(), "--method", "gmm"}, false},
      {"fit pl", {"fit", data, "--config", cfg.string(), "--method", "pl"}, false},
      {"forecast", {"forecast", data, "--model", cfg.string(), "--quantiles", "--samples", "500"}, false},
      {"bench grad", {"bench", "--suite", "grad", "--replicates", "2"}, true},
      {"bench cv", {"bench", "--suite", "cv", "--replicates", "1"}, true},
      {"bench inference", {"bench", "--suite", "inference", "--config", cfg.string(), "--replicates", "2"}, true},
      {"bench forecast", {"bench", "--suite", "forecast", "--config", cfg.string(), "--replicates", "1"}, true},
  };
  int k = 0;
  for (const auto& c : cmds) {
    const fs::path target = root / ("out" + std::to_string(k++));
    std::string first;
    bool same = true;
    for (const char* threads : {"1", "3"}) {
      for (int rep = 0; rep < (threads[0] == '1' ? 2 : 1); ++rep) {
        auto args = c.args;
        args.insert(args.end(), {"--seed", "7", "--threads", threads});
        fs::remove_all(target);
        args.insert(args.end(), {"--out", c.dir_out ? target.string() : target.string() + ".txt"});
        const Run r = cli(args);
        if (r.code != 0) {
          log.fail(c.name + " exit " + std::to_string(r.code) + ": " + r.err.substr(0, 200));
          same = false;
          break;
        }
        const std::string bytes =
            r.out + "\n" + (c.dir_out ? dir_bytes(target) : read_text_file(target.string() + ".txt"));
        if (first.empty())
          first = bytes;
        else if (bytes != first)
          same = false;
      }
    }
    if (!same) log.fail(c.name + " output differs across runs or thread counts");
  }
  std::error_code ec;
  fs::remove_all(root, ec);
  log.note(std::to_string(cmds.size()) + " commands compared at 1 thread (twice) and 3 threads");
  return log.done();
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 Gaussian pairwise density", gaussian_pairwise},
      {"2 discrete exactness", discrete_exact},
      {"3 pathwise gradients", pathwise_gradients},
      {"4 log-PL gradient", log_pl_gradient},
      {"5 gradient benchmark", gradient_benchmark},
      {"6 control variates", control_variates},
      {"7 forecast", forecast_check},
      {"8 PL vs GMM", pl_vs_gmm},
      {"9 estimator cross-consistency", cross_consistency},
      {"10 CLI reproducibility", cli_reproducible},
  };
  std::vector<std::string> only(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    const std::string id = name.substr(0, name.find(' '));
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << name << ": " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
