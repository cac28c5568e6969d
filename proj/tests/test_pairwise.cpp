#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "trawl/error.hpp"
#include "trawl/pairwise.hpp"
#include "trawl/problem.hpp"

using namespace trawl;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

PairContext context(SeedDistribution seed, TrawlFunction tf, double xs, double xt, double h) {
  return PairContext{xs, xt, h, ModelSpec{std::move(seed), std::move(tf)}};
}

// Bivariate normal log density of a Gaussian seed (mu, sigma) with an
// exponential trawl (lambda): mean mu L, variance sigma^2 L, covariance sigma^2 L e^(-lambda h).
double gaussian_pair_logpdf(const std::vector<double>& th, double xs, double xt, double h) {
  const double mu = th[0], sig = th[1], lam = th[2];
  const double L = 1.0 / lam;
  const double v = sig * sig * L, c = v * std::exp(-lam * h);
  const double a = xs - mu * L, b = xt - mu * L;
  const double det = v * v - c * c;
  return -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(det) - 0.5 * (v * a * a - 2.0 * c * a * b + v * b * b) / det;
}

std::vector<double> fd_gradient(const std::vector<double>& th, auto f) {
  std::vector<double> g(th.size());
  for (std::size_t j = 0; j < th.size(); ++j) {
    const double s = 1e-6 * std::max(1.0, std::abs(th[j]));
    auto p = th, m = th;
    p[j] += s;
    m[j] -= s;
    g[j] = (f(p) - f(m)) / (2.0 * s);
  }
  return g;
}

void check_agree(double a, double sa, double b, double sb, double k = 3.0) {
  const double se = std::sqrt(sa * sa + sb * sb);
  INFO(a << " vs " << b << " joint se " << se);
  CHECK(std::abs(a - b) <= k * se + 1e-12 * std::abs(b));
}

double poisson_pmf(double k, double lam) { return std::exp(k * std::log(lam) - lam - std::lgamma(k + 1.0)); }

}  // namespace

TEST_CASE("Gaussian pairwise density against the bivariate normal", "[pairwise]") {
  const std::vector<double> th = {0.4, 1.3, 0.6};
  const double xs = 1.1, xt = -0.2, h = 0.8;
  const auto ctx = context(SeedDistribution::gaussian(th[0], th[1]), TrawlFunction::exponential(th[2]), xs, xt, h);
  const double lp = gaussian_pair_logpdf(th, xs, xt, h);
  CHECK_THAT(lp, WithinAbs(-3.035847769907268, 1e-12));

  CHECK_THAT(pairwise_density_quadrature(ctx), WithinRel(std::exp(lp), 1e-8));

  Rng rng(101);
  const auto mc = pairwise_density_mc(ctx, 20000, rng);
  check_agree(mc.density, mc.density_se, std::exp(lp), 0.0);

  const auto g = fd_gradient(th, [&](const std::vector<double>& t) { return gaussian_pair_logpdf(t, xs, xt, h); });
  for (PairMethod m : {PairMethod::PG, PairMethod::SF, PairMethod::MVG}) {
    INFO(pair_method_name(m));
    PairOptions o;
    o.method = m;
    o.n = 50000;
    const auto e = pairwise_logdensity_and_grad(ctx, o, rng);
    check_agree(e.log_density, e.log_se, lp, 0.0);
    REQUIRE(e.grad.size() == 3);
    for (int j = 0; j < 3; ++j) check_agree(e.grad[j], e.grad_se[j], g[j], 0.0);
  }
}

TEST_CASE("Gamma seed with exponential trawl against quadrature", "[pairwise]") {
  const auto ctx = context(SeedDistribution::gamma(3.0, 0.75), TrawlFunction::exponential(0.25), 16.0, 16.0, 1.0);
  const double q = pairwise_density_quadrature(ctx);
  // Independent oracle: Simpson's rule on the convolution over the common slice.
  {
    const SliceTriple sl = ctx.slices();
    const auto qc = SeedDistribution::gamma(3.0 * sl.common, 0.75);
    const auto ql = SeedDistribution::gamma(3.0 * sl.left, 0.75);
    const int n = 200000;
    const double hs = 16.0 / n;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double z = i * hs;
      const double v = (i == 0 || i == n) ? 0.0 : density(qc, z) * std::pow(density(ql, 16.0 - z), 2);
      s += v * (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0));
    }
    CHECK_THAT(q, WithinRel(s * hs / 3.0, 1e-7));
  }
  CHECK_THAT(q, WithinRel(0.01330351583132787, 1e-8));
  Rng rng(102);
  const auto mc = pairwise_density_mc(ctx, 100000, rng);
  check_agree(mc.density, mc.density_se, q, 0.0);
  const auto cv = pairwise_density_mc(ctx, 100000, rng, 2);
  check_agree(cv.density, cv.density_se, q, 0.0);
  CHECK(cv.density_se < mc.density_se);
}

TEST_CASE("other continuous seeds agree with quadrature", "[pairwise]") {
  struct Case {
    SeedDistribution seed;
    double xs, xt;
  };
  const std::vector<Case> cases = {
      {SeedDistribution::inv_gaussian(1.5, 2.0), 1.2, 2.1},
      {SeedDistribution::nig(2.0, 0.5, 1.0, 0.2), 0.3, -0.4},
      {SeedDistribution::gamma(1.2, 2.0), 0.5, 0.9},
  };
  Rng rng(103);
  for (const auto& c : cases) {
    INFO(family_name(c.seed.family()));
    const auto ctx = context(c.seed, TrawlFunction::sup_exponential({0.4, 0.6}, {0.5, 2.0}), c.xs, c.xt, 0.7);
    const double q = pairwise_density_quadrature(ctx);
    const auto mc = pairwise_density_mc(ctx, 100000, rng);
    check_agree(mc.density, mc.density_se, q, 0.0);
    PairOptions o;
    o.n = 100000;
    const auto e = pairwise_logdensity_and_grad(ctx, o, rng);
    check_agree(e.log_density, e.log_se, std::log(q), 0.0);
  }
}

TEST_CASE("independence limit", "[pairwise]") {
  const auto tf = TrawlFunction::exponential(1.0);
  const double h = 15.0;
  REQUIRE(acf(tf, h) < 1e-6);
  const auto ctx = context(SeedDistribution::gamma(2.0, 1.5), tf, 0.8, 2.3, h);
  const auto marg = ctx.model.marginal();
  const double prod = density(marg, 0.8) * density(marg, 2.3);
  Rng rng(104);
  const auto mc = pairwise_density_mc(ctx, 20000, rng);
  CHECK_THAT(mc.density, WithinRel(prod, 1e-5));
  CHECK_THAT(pairwise_density_quadrature(ctx), WithinRel(prod, 1e-5));
}

TEST_CASE("Poisson exact sums", "[pairwise]") {
  // Unit rate trawl at lag ln 2 has common and side areas 1/2.
  const auto tf = TrawlFunction::exponential(1.0);
  const auto ctx = context(SeedDistribution::poisson(1.0), tf, 0.0, 0.0, std::log(2.0));
  const SliceTriple sl = ctx.slices();
  REQUIRE_THAT(sl.common, WithinRel(0.5, 1e-15));
  REQUIRE_THAT(sl.left, WithinRel(0.5, 1e-15));
  const double brute = poisson_pmf(0, 0.5) * poisson_pmf(0, 0.5) * poisson_pmf(0, 0.5);
  CHECK_THAT(brute, WithinRel(std::exp(-1.5), 1e-15));
  CHECK_THAT(pairwise_density_discrete(ctx), WithinRel(std::exp(-1.5), 1e-14));

  auto c2 = context(SeedDistribution::poisson(1.7), TrawlFunction::exponential(0.8), 0.0, 5.0, 0.6);
  const SliceTriple s2 = c2.slices();
  const double nu = 1.7;
  CHECK_THAT(pairwise_density_discrete(c2),
             WithinRel(poisson_pmf(0, nu * s2.common) * poisson_pmf(0, nu * s2.left) * poisson_pmf(5, nu * s2.right), 1e-13));

  // Marginalization over x_t.
  auto c3 = context(SeedDistribution::poisson(2.5), TrawlFunction::exponential(0.9), 3.0, 0.0, 0.4);
  double s = 0.0;
  for (int k = 0; k < 200; ++k) {
    c3.xt = k;
    s += pairwise_density_discrete(c3);
  }
  CHECK_THAT(s, WithinAbs(density(c3.model.marginal(), 3.0), 1e-10));

  c3.xt = 2.5;
  CHECK_THROWS_AS(pairwise_density_discrete(c3), DomainError);
  c3.xt = -1.0;
  const auto out = pairwise_logdensity_discrete(c3);
  CHECK(out.outside_support);
  CHECK(out.density == 0.0);
}

TEST_CASE("discrete seeds: symmetry, marginals and gradients", "[pairwise][property]") {
  const auto tf = TrawlFunction::sup_exponential({0.5, 0.5}, {0.3, 1.7});
  const std::vector<SeedDistribution> seeds = {SeedDistribution::poisson(2.0), SeedDistribution::negbinomial(3.0, 0.4),
                                               SeedDistribution::skellam(1.0, 1.0), SeedDistribution::skellam(2.0, 0.7)};
  for (const auto& seed : seeds) {
    INFO(family_name(seed.family()));
    const bool sk = seed.family() == Family::Skellam;
    for (auto [a, b] : std::vector<std::pair<double, double>>{{0, 3}, {4, 1}, {7, 7}, {sk ? -3.0 : 2.0, 5}}) {
      auto c = context(seed, tf, a, b, 0.9);
      const auto e1 = pairwise_logdensity_discrete(c);
      std::swap(c.xs, c.xt);
      const auto e2 = pairwise_logdensity_discrete(c);
      CHECK(e1.log_density == e2.log_density);

      // Gradient against central differences of the exact value.
      const auto th = c.model.theta();
      const auto g = fd_gradient(th, [&](const std::vector<double>& t) {
        auto cc = c;
        cc.model = c.model.with_theta(t);
        return pairwise_logdensity_discrete(cc).log_density;
      });
      for (std::size_t j = 0; j < th.size(); ++j) CHECK_THAT(e2.grad[j], WithinAbs(g[j], 1e-6 * (1 + std::abs(g[j]))));
    }
    // Sum over x_t against the marginal pmf.
    auto c = context(seed, tf, 2.0, 0.0, 0.9);
    double s = 0.0;
    for (int k = sk ? -150 : 0; k < 150; ++k) {
      c.xt = k;
      s += pairwise_density_discrete(c);
    }
    CHECK_THAT(s, WithinAbs(density(c.model.marginal(), 2.0), 1e-10));
  }
}

TEST_CASE("gradient engines for discrete seeds match the exact sums", "[pairwise]") {
  const auto tf = TrawlFunction::exponential(0.6);
  Rng rng(105);
  struct Case {
    SeedDistribution seed;
    PairMethod method;
  };
  for (const auto& c : std::vector<Case>{{SeedDistribution::poisson(1.5), PairMethod::MVG},
                                         {SeedDistribution::skellam(1.2, 0.8), PairMethod::MVG},
                                         {SeedDistribution::negbinomial(2.0, 0.35), PairMethod::Hybrid},
                                         {SeedDistribution::poisson(1.5), PairMethod::SF}}) {
    INFO(family_name(c.seed.family()) << " " << pair_method_name(c.method));
    const auto ctx = context(c.seed, tf, 3.0, 2.0, 0.5);
    const auto ex = pairwise_logdensity_discrete(ctx);
    PairOptions o;
    o.method = c.method;
    o.n = 100000;
    const auto e = pairwise_logdensity_and_grad(ctx, o, rng);
    check_agree(e.log_density, e.log_se, ex.log_density, 0.0, 4.0);
    for (std::size_t j = 0; j < ex.grad.size(); ++j) check_agree(e.grad[j], e.grad_se[j], ex.grad[j], 0.0, 4.0);
  }
  PairOptions o;
  o.method = PairMethod::PG;
  CHECK_THROWS_AS(pairwise_logdensity_and_grad(context(SeedDistribution::poisson(1.0), tf, 1, 1, 1), o, rng),
                  UnsupportedError);
  o.method = PairMethod::Auto;
  o.cv_degree = 1;
  o.method = PairMethod::SF;
  CHECK_THROWS_AS(pairwise_logdensity_and_grad(context(SeedDistribution::poisson(1.0), tf, 1, 1, 1), o, rng),
                  UnsupportedError);
}

TEST_CASE("Monte Carlo symmetry under common random numbers", "[pairwise][property]") {
  const auto tf = TrawlFunction::gamma(1.5, 0.6);
  for (const auto& seed : {SeedDistribution::gamma(2.0, 1.0), SeedDistribution::gaussian(0.3, 1.1),
                           SeedDistribution::inv_gaussian(1.0, 2.0)}) {
    Rng r1(7), r2(7);
    const auto a = pairwise_density_mc(context(seed, tf, 1.4, 0.6, 0.5), 5000, r1);
    const auto b = pairwise_density_mc(context(seed, tf, 0.6, 1.4, 0.5), 5000, r2);
    CHECK_THAT(a.density, WithinRel(b.density, 1e-14));
  }
}

TEST_CASE("error bars cover the quadrature value", "[pairwise][property]") {
  const auto ctx = context(SeedDistribution::gamma(3.0, 0.75), TrawlFunction::exponential(0.25), 12.0, 18.0, 1.0);
  const double q = pairwise_density_quadrature(ctx);
  Rng rng(106);
  int inside = 0, inside_log = 0;
  PairOptions o;
  o.n = 500;
  for (int r = 0; r < 200; ++r) {
    const auto mc = pairwise_density_mc(ctx, 500, rng);
    if (std::abs(mc.density - q) <= 3.0 * mc.density_se) ++inside;
    const auto e = pairwise_logdensity_and_grad(ctx, o, rng);
    if (std::abs(e.log_density - std::log(q)) <= 3.0 * e.log_se) ++inside_log;
  }
  CHECK(inside >= 196);
  CHECK(inside_log >= 196);
}

TEST_CASE("Gamma gradient against finite differences with common random numbers", "[pairwise]") {
  const auto ctx = context(SeedDistribution::gamma(3.0, 0.75), TrawlFunction::exponential(0.25), 16.0, 16.0, 1.0);
  const std::size_t n = 1000000;
  PairOptions o;
  o.n = n;
  Rng rng(107);
  const auto e = pairwise_logdensity_and_grad(ctx, o, rng);
  const auto th = ctx.model.theta();
  for (std::size_t j = 0; j < th.size(); ++j) {
    const double s = 1e-3 * std::max(1.0, std::abs(th[j]));
    auto log_at = [&](double d) {
      auto t = th;
      t[j] += d;
      auto c = ctx;
      c.model = ctx.model.with_theta(t);
      Rng r(107);
      return pairwise_density_mc(c, n, r).log_density;
    };
    const double fd = (log_at(s) - log_at(-s)) / (2.0 * s);
    INFO("parameter " << j);
    CHECK_THAT(e.grad[j], WithinRel(fd, 0.01));
  }
}

TEST_CASE("constant integrand has zero gradient", "[pairwise]") {
  const auto ctx = context(SeedDistribution::gamma(3.0, 0.75), TrawlFunction::exponential(0.25), 16.0, 16.0, 1.0);
  const Distribution q = pair_mixing_law(ctx.model, ctx.h);
  auto p = make_problem<2>(q, [](const auto& z, const auto*) { return 0.0 * z + 2.0; });
  Rng rng(108);
  const auto pg = pg_estimate(p, 10000, rng);
  for (double g : pg.value) CHECK(g == 0.0);
  const auto sf = sf_estimate(p, 10000, rng);
  for (int j = 0; j < 2; ++j) CHECK(std::abs(sf.value[j]) <= 3.0 * sf.std_error[j]);
}

TEST_CASE("shared draws give the same estimate as per-pair draws", "[pairwise]") {
  const auto ctx = context(SeedDistribution::gamma(2.0, 1.0), TrawlFunction::exponential(0.5), 1.0, 3.0, 0.7);
  Rng r1(9), r2(9);
  PairOptions o;
  o.n = 2000;
  const auto a = pairwise_logdensity_and_grad(ctx, o, r1);
  const auto base = draw_base(2000, r2);
  const Draws d = make_draws(Estimator::PG, pair_mixing_law(ctx.model, ctx.h), base);
  const auto b = pairwise_logdensity_and_grad(ctx, o, base, &d);
  CHECK(a.log_density == b.log_density);
  for (std::size_t j = 0; j < a.grad.size(); ++j) CHECK(a.grad[j] == b.grad[j]);
}

TEST_CASE("outside the support and adaptive sample size", "[pairwise]") {
  const auto tf = TrawlFunction::exponential(0.5);
  Rng rng(110);
  PairOptions o;
  const auto out = pairwise_logdensity_and_grad(context(SeedDistribution::gamma(2.0, 1.0), tf, -0.5, 1.0, 1.0), o, rng);
  CHECK(out.outside_support);
  CHECK(out.log_density == -std::numeric_limits<double>::infinity());
  CHECK(pairwise_density_quadrature(context(SeedDistribution::gamma(2.0, 1.0), tf, 1.0, 0.0, 1.0)) == 0.0);
  CHECK_THROWS_AS(pairwise_density_mc(context(SeedDistribution::gamma(2.0, 1.0), tf, 1.0, 1.0, 0.0), 10, rng), DomainError);

  o.n = 50;
  o.adaptive = true;
  o.target_rel_var = 1e-4;
  const auto e = pairwise_logdensity_and_grad(context(SeedDistribution::gamma(2.0, 1.0), tf, 1.0, 3.0, 1.0), o, rng);
  CHECK(e.n > 50);
  CHECK((e.log_se * e.log_se <= 1.5e-4 || e.n == o.max_n));
}
