#include "trawl/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "trawl/dist_ad.hpp"
#include "trawl/error.hpp"
#include "trawl/incomplete.hpp"
#include "trawl/quadrature.hpp"
#include "trawl/special.hpp"

namespace trawl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& msg) {
  if (!ok) throw DomainError(msg);
}

bool is_integer(double x) { return std::isfinite(x) && std::floor(x) == x; }

using D4 = Dual<kMaxSeedParams>;

std::array<D4, kMaxSeedParams> dual_params(const SeedDistribution& d) {
  std::array<D4, kMaxSeedParams> p;
  for (int i = 0; i < d.size(); ++i) p[i] = D4::variable(d[i], i);
  return p;
}

std::vector<double> grad_of(const D4& v, int n) { return {v.d.begin(), v.d.begin() + n}; }

}  // namespace

int param_count(Family f) {
  switch (f) {
    case Family::Poisson:
      return 1;
    case Family::NIG:
      return 4;
    default:
      return 2;
  }
}

std::string family_name(Family f) {
  switch (f) {
    case Family::Poisson: return "poisson";
    case Family::NegBinomial: return "negbinomial";
    case Family::Skellam: return "skellam";
    case Family::Uniform: return "uniform";
    case Family::Beta: return "beta";
    case Family::Gamma: return "gamma";
    case Family::InvGaussian: return "invgaussian";
    case Family::Gaussian: return "gaussian";
    case Family::DSMaxwell: return "dsmaxwell";
    case Family::NIG: return "nig";
  }
  return "unknown";
}

Family family_from_name(const std::string& name) {
  for (Family f : {Family::Poisson, Family::NegBinomial, Family::Skellam, Family::Uniform, Family::Beta,
                   Family::Gamma, Family::InvGaussian, Family::Gaussian, Family::DSMaxwell, Family::NIG})
    if (family_name(f) == name) return f;
  throw DomainError("unknown distribution family '" + name + "'");
}

std::vector<std::string> param_names(Family f) {
  switch (f) {
    case Family::Poisson: return {"lambda"};
    case Family::NegBinomial: return {"m", "p"};
    case Family::Skellam: return {"mu1", "mu2"};
    case Family::Uniform: return {"a", "b"};
    case Family::Beta: return {"alpha", "beta"};
    case Family::Gamma: return {"alpha", "beta"};
    case Family::InvGaussian: return {"mu", "lambda"};
    case Family::Gaussian: return {"mu", "sigma"};
    case Family::DSMaxwell: return {"mu", "sigma"};
    case Family::NIG: return {"alpha", "beta", "delta", "mu"};
  }
  return {};
}

bool is_discrete(Family f) {
  return f == Family::Poisson || f == Family::NegBinomial || f == Family::Skellam;
}

bool is_positive_support(Family f) {
  return f == Family::Gamma || f == Family::InvGaussian || f == Family::Beta;
}

bool is_basis_family(Family f) {
  return f != Family::Uniform && f != Family::Beta && f != Family::DSMaxwell;
}

SeedDistribution::SeedDistribution(Family f, std::span<const double> params) : family_(f) {
  const int n = param_count(f);
  require(static_cast<int>(params.size()) == n,
          family_name(f) + ": expected " + std::to_string(n) + " parameters");
  for (int i = 0; i < n; ++i) {
    require(std::isfinite(params[i]), family_name(f) + ": parameters must be finite");
    params_[i] = params[i];
  }
  const auto& p = params_;
  switch (f) {
    case Family::Poisson:
      require(p[0] > 0, "poisson: lambda must be positive");
      break;
    case Family::NegBinomial:
      require(p[0] > 0, "negbinomial: m must be positive");
      require(p[1] >= 0 && p[1] < 1, "negbinomial: p must lie in [0,1)");
      break;
    case Family::Skellam:
      require(p[0] > 0 && p[1] > 0, "skellam: mu1 and mu2 must be positive");
      break;
    case Family::Uniform:
      require(p[0] < p[1], "uniform: requires a < b");
      break;
    case Family::Beta:
    case Family::Gamma:
      require(p[0] > 0 && p[1] > 0, family_name(f) + ": parameters must be positive");
      break;
    case Family::InvGaussian:
      require(p[0] > 0 && p[1] > 0, "invgaussian: mu and lambda must be positive");
      break;
    case Family::Gaussian:
    case Family::DSMaxwell:
      require(p[1] > 0, family_name(f) + ": sigma must be positive");
      break;
    case Family::NIG:
      require(p[0] > 0 && std::fabs(p[1]) < p[0], "nig: requires alpha > |beta|");
      require(p[2] > 0, "nig: delta must be positive");
      gamma_ = std::sqrt(p[0] * p[0] - p[1] * p[1]);
      break;
  }
}

SeedDistribution::SeedDistribution(Family f, std::initializer_list<double> params)
    : SeedDistribution(f, std::span<const double>(params.begin(), params.size())) {}

TruncatedSeed::TruncatedSeed(SeedDistribution b, double up) : base(b), upper(up) {
  require(is_positive_support(base.family()), "truncated seed: base family must have positive support");
  require(std::isfinite(upper) && upper > 0, "truncated seed: upper bound must be finite and positive");
}

const SeedDistribution& base_of(const Distribution& d) {
  if (auto* s = std::get_if<SeedDistribution>(&d)) return *s;
  return std::get<TruncatedSeed>(d).base;
}

int param_count(const Distribution& d) { return base_of(d).size(); }

// ---------------------------------------------------------------- densities

double log_density(const SeedDistribution& d, double x) {
  const Family f = d.family();
  if (d.discrete()) {
    if (!is_integer(x)) throw DomainError(family_name(f) + ": pmf evaluated at a non-integer");
    if (f != Family::Skellam && x < 0) return -kInf;
    if (f == Family::NegBinomial && d[1] == 0.0) return x == 0 ? 0.0 : -kInf;
  } else {
    switch (f) {
      case Family::Uniform:
        if (x < d[0] || x > d[1]) return -kInf;
        break;
      case Family::Beta:
        if (x < 0 || x > 1) return -kInf;
        if (x == 0 || x == 1) {
          const double e = x == 0 ? d[0] : d[1];
          if (e < 1) return kInf;
          if (e > 1) return -kInf;
          return -log_beta(d[0], d[1]);
        }
        break;
      case Family::Gamma:
        if (x < 0) return -kInf;
        if (x == 0) {
          if (d[0] < 1) return kInf;
          if (d[0] > 1) return -kInf;
          return std::log(d[1]);
        }
        break;
      case Family::InvGaussian:
        if (x <= 0) return -kInf;
        break;
      case Family::DSMaxwell:
        if (x == d[0]) return -kInf;
        break;
      default:
        break;
    }
  }
  return log_density_t<double>(f, d.params().data(), x);
}

double density(const SeedDistribution& d, double x) { return std::exp(log_density(d, x)); }

double log_density(const Distribution& d, double x) {
  if (auto* s = std::get_if<SeedDistribution>(&d)) return log_density(*s, x);
  const auto& t = std::get<TruncatedSeed>(d);
  if (x <= 0 || x > t.upper) return -kInf;
  return log_density(t.base, x) - std::log(cdf(t.base, t.upper));
}

double density(const Distribution& d, double x) { return std::exp(log_density(d, x)); }

double log_density_dx(const SeedDistribution& d, double x) {
  if (d.discrete()) throw UnsupportedError("log_density_dx: discrete family");
  using D1 = Dual<1>;
  std::array<D1, kMaxSeedParams> p;
  for (int i = 0; i < d.size(); ++i) p[i] = D1(d[i]);
  return log_density_t<D1>(d.family(), p.data(), D1::variable(x, 0)).d[0];
}

// ---------------------------------------------------------------- cdf

namespace {

double skellam_cdf(const SeedDistribution& d, double k) {
  const double mode = std::floor(d[0] - d[1]);
  auto pmf = [&](double j) { return density(d, j); };
  if (k <= mode) {
    double s = 0.0;
    for (double j = k;; j -= 1.0) {
      const double t = pmf(j);
      s += t;
      if (t <= 1e-18 * s || (s == 0.0 && j < k - 1e6)) break;
    }
    return std::min(1.0, s);
  }
  double s = 0.0;
  for (double j = k + 1;; j += 1.0) {
    const double t = pmf(j);
    s += t;
    if (t <= 1e-18 * std::max(s, 1e-300)) break;
  }
  return std::max(0.0, 1.0 - s);
}

double nig_cdf(const SeedDistribution& d, double x) {
  const double g = d.nig_gamma();
  const double m = d[3] + d[2] * d[1] / g;
  QuadOptions o;
  o.rel_tol = 1e-13;
  o.abs_tol = 1e-16;
  auto pdf = [&](double z) { return density(d, z); };
  if (x <= m) return integrate(pdf, -kInf, x, o).value;
  return 1.0 - integrate(pdf, x, kInf, o).value;
}

double invgauss_cdf(double mu, double lam, double x) {
  if (x <= 0) return 0.0;
  const double s = std::sqrt(lam / x);
  const double a = s * (x / mu - 1.0);
  const double b = -s * (x / mu + 1.0);
  return normal_cdf(a) + std::exp(2.0 * lam / mu + normal_log_cdf(b));
}

}  // namespace

double cdf(const SeedDistribution& d, double x) {
  if (std::isnan(x)) throw DomainError("cdf: NaN argument");
  const double* p = d.params().data();
  switch (d.family()) {
    case Family::Poisson:
      if (x < 0) return 0.0;
      return gamma_q(std::floor(x) + 1.0, p[0]);
    case Family::NegBinomial:
      if (x < 0) return 0.0;
      if (p[1] == 0.0) return 1.0;
      return inc_beta(p[0], std::floor(x) + 1.0, 1.0 - p[1]);
    case Family::Skellam:
      if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
      return skellam_cdf(d, std::floor(x));
    case Family::Uniform:
      return std::clamp((x - p[0]) / (p[1] - p[0]), 0.0, 1.0);
    case Family::Beta:
      return x <= 0 ? 0.0 : x >= 1 ? 1.0 : inc_beta(p[0], p[1], x);
    case Family::Gamma:
      return x <= 0 ? 0.0 : std::isinf(x) ? 1.0 : gamma_p(p[0], p[1] * x);
    case Family::InvGaussian:
      return std::isinf(x) ? 1.0 : invgauss_cdf(p[0], p[1], x);
    case Family::Gaussian:
      return normal_cdf((x - p[0]) / p[1]);
    case Family::DSMaxwell: {
      if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
      const double w = (x - p[0]) / p[1];
      return normal_cdf(w) - w * normal_pdf(w);
    }
    case Family::NIG:
      if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
      return nig_cdf(d, x);
  }
  throw ConsistencyError("cdf: unknown family");
}

double cdf(const Distribution& d, double x) {
  if (auto* s = std::get_if<SeedDistribution>(&d)) return cdf(*s, x);
  const auto& t = std::get<TruncatedSeed>(d);
  if (x >= t.upper) return 1.0;
  return std::clamp(cdf(t.base, x) / cdf(t.base, t.upper), 0.0, 1.0);
}

// ---------------------------------------------------------------- quantile

namespace {

double discrete_quantile(const SeedDistribution& d, double u) {
  const double m = mean(d), sd = std::sqrt(variance(d));
  const double lower = d.family() == Family::Skellam ? -kInf : 0.0;
  double k = std::floor(m + sd * normal_quantile(u));
  if (k < lower) k = lower;
  double F = cdf(d, k);
  if (F >= u) {
    while (k > lower) {
      const double Fm = F - density(d, k);
      if (Fm < u) break;
      k -= 1.0;
      F = Fm;
    }
    return k;
  }
  while (F < u) {
    k += 1.0;
    F += density(d, k);
    if (k > m + 1e4 * (sd + 1.0)) throw ConvergenceError("discrete quantile search diverged");
  }
  return k;
}

// Safeguarded Newton iteration on the CDF with an expanding bracket.
double invert_continuous(const SeedDistribution& d, double u, double x0, double lo, double hi) {
  auto F = [&](double x) { return cdf(d, x); };
  double step = std::max(1.0, std::fabs(x0));
  if (std::isinf(lo)) {
    lo = x0 - step;
    while (F(lo) > u) {
      step *= 2.0;
      lo = x0 - step;
    }
  }
  if (std::isinf(hi)) {
    step = std::max(1.0, std::fabs(x0));
    hi = x0 + step;
    while (F(hi) < u) {
      step *= 2.0;
      hi = x0 + step;
    }
  }
  double x = std::clamp(x0, lo, hi);
  if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
  for (int it = 0; it < 300; ++it) {
    const double fx = F(x) - u;
    if (std::fabs(fx) <= 1e-14) return x;
    if (fx < 0)
      lo = x;
    else
      hi = x;
    const double q = density(d, x);
    double xn = (q > 0 && std::isfinite(q)) ? x - fx / q : 0.5 * (lo + hi);
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (std::fabs(xn - x) <= 1e-15 * std::max(1.0, std::fabs(x)) || hi - lo <= 1e-15 * std::max(1.0, std::fabs(x)))
      return xn;
    x = xn;
  }
  return x;
}

}  // namespace

double quantile(const SeedDistribution& d, double u) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile: u must lie in (0,1)");
  const double* p = d.params().data();
  switch (d.family()) {
    case Family::Poisson:
    case Family::NegBinomial:
    case Family::Skellam:
      return discrete_quantile(d, u);
    case Family::Uniform:
      return p[0] + (p[1] - p[0]) * u;
    case Family::Beta:
      return inc_beta_inv(p[0], p[1], u);
    case Family::Gamma:
      return gamma_p_inv(p[0], u) / p[1];
    case Family::Gaussian:
      return p[0] + p[1] * normal_quantile(u);
    case Family::InvGaussian: {
      // Start from the Gaussian approximation, clipped into the support.
      const double m = p[0], sd = std::sqrt(p[0] * p[0] * p[0] / p[1]);
      double x0 = m + sd * normal_quantile(u);
      if (x0 <= 0) x0 = 0.5 * m;
      return invert_continuous(d, u, x0, 0.0, kInf);
    }
    case Family::DSMaxwell: {
      const double x0 = p[0] + p[1] * std::sqrt(3.0) * normal_quantile(u);
      return invert_continuous(d, u, x0, -kInf, kInf);
    }
    case Family::NIG: {
      const double x0 = mean(d) + std::sqrt(variance(d)) * normal_quantile(u);
      return invert_continuous(d, u, x0, -kInf, kInf);
    }
  }
  throw ConsistencyError("quantile: unknown family");
}

double quantile(const Distribution& d, double u) {
  if (auto* s = std::get_if<SeedDistribution>(&d)) return quantile(*s, u);
  if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile: u must lie in (0,1)");
  const auto& t = std::get<TruncatedSeed>(d);
  const double v = u * cdf(t.base, t.upper);
  if (!(v > 0.0)) return 0.0;
  return std::min(quantile(t.base, v), t.upper);
}

// ---------------------------------------------------------------- sampling

namespace {

double sample_gamma(double shape, double rate, Rng& rng) {
  std::gamma_distribution<double> g(shape, 1.0);
  return g(rng.engine()) / rate;
}

double sample_poisson(double lambda, Rng& rng) {
  std::poisson_distribution<long long> p(lambda);
  return static_cast<double>(p(rng.engine()));
}

double sample_invgauss(double mu, double lam, Rng& rng) {
  const double nu = rng.normal();
  const double r = mu * nu * nu / (2.0 * lam);
  const double x = mu / (1.0 + r + std::sqrt(r * (r + 2.0)));
  return rng.uniform() <= mu / (mu + x) ? x : mu * mu / x;
}

}  // namespace

double sample(const SeedDistribution& d, Rng& rng) {
  const double* p = d.params().data();
  switch (d.family()) {
    case Family::Poisson:
      return sample_poisson(p[0], rng);
    case Family::NegBinomial: {
      if (p[1] == 0.0) return 0.0;
      const double y = sample_gamma(p[0], (1.0 - p[1]) / p[1], rng);
      return y > 0 ? sample_poisson(y, rng) : 0.0;
    }
    case Family::Skellam:
      return sample_poisson(p[0], rng) - sample_poisson(p[1], rng);
    case Family::Uniform:
      return p[0] + (p[1] - p[0]) * rng.uniform();
    case Family::Beta: {
      const double x = sample_gamma(p[0], 1.0, rng);
      const double y = sample_gamma(p[1], 1.0, rng);
      return x / (x + y);
    }
    case Family::Gamma:
      return sample_gamma(p[0], p[1], rng);
    case Family::InvGaussian:
      return sample_invgauss(p[0], p[1], rng);
    case Family::Gaussian:
      return p[0] + p[1] * rng.normal();
    case Family::DSMaxwell: {
      const double s = rng.uniform() < 0.5 ? -1.0 : 1.0;
      const double r = std::sqrt(sample_gamma(1.5, 0.5, rng));
      return p[0] + p[1] * s * r;
    }
    case Family::NIG: {
      const double g = d.nig_gamma();
      const double v = sample_invgauss(p[2] / g, p[2] * p[2], rng);
      return p[3] + p[1] * v + std::sqrt(v) * rng.normal();
    }
  }
  throw ConsistencyError("sample: unknown family");
}

double sample(const Distribution& d, Rng& rng) {
  if (auto* s = std::get_if<SeedDistribution>(&d)) return sample(*s, rng);
  return quantile(d, rng.uniform());
}

std::vector<double> sample(const Distribution& d, Rng& rng, std::size_t n) {
  if (n < 1) throw DomainError("sample: n must be at least 1");
  std::vector<double> out(n);
  for (auto& x : out) x = sample(d, rng);
  return out;
}

// ---------------------------------------------------------------- moments

double raw_moment(const SeedDistribution& d, int l) {
  if (l < 0) throw DomainError("raw_moment: negative order");
  return raw_moment_t<double>(d.family(), d.params().data(), l);
}

std::vector<double> moment_gradient(const SeedDistribution& d, int l) {
  if (l < 0) throw DomainError("moment_gradient: negative order");
  auto p = dual_params(d);
  return grad_of(raw_moment_t<D4>(d.family(), p.data(), l), d.size());
}

double shifted_moment(const SeedDistribution& d, int l, double c) {
  double s = 0.0, binom = 1.0;
  for (int j = 0; j <= l; ++j) {
    const double mj = j == 0 ? 1.0 : raw_moment(d, j);
    s += binom * mj * std::pow(-c, l - j);
    binom = binom * (l - j) / (j + 1.0);
  }
  return s;
}

std::vector<double> shifted_moment_gradient(const SeedDistribution& d, int l, double c) {
  std::vector<double> g(d.size(), 0.0);
  double binom = 1.0;
  for (int j = 0; j <= l; ++j) {
    if (j > 0) {
      const auto mg = moment_gradient(d, j);
      const double w = binom * std::pow(-c, l - j);
      for (int i = 0; i < d.size(); ++i) g[i] += w * mg[i];
    }
    binom = binom * (l - j) / (j + 1.0);
  }
  return g;
}

double mean(const SeedDistribution& d) { return raw_moment(d, 1); }

double variance(const SeedDistribution& d) {
  const double m = raw_moment(d, 1);
  return raw_moment(d, 2) - m * m;
}

bool has_moments(const Distribution& d) { return std::holds_alternative<SeedDistribution>(d); }

// ---------------------------------------------------------------- basis scaling

SeedDistribution basis_scale(const SeedDistribution& seed, double leb) {
  if (!(leb > 0.0) || !std::isfinite(leb))
    throw DomainError("basis_scale: area must be positive and finite");
  std::array<double, kMaxSeedParams> out{};
  basis_scale_t<double>(seed.family(), seed.params().data(), leb, out.data());
  return SeedDistribution(seed.family(), std::span<const double>(out.data(), seed.size()));
}

std::vector<double> basis_scale_jacobian(const SeedDistribution& seed, double leb) {
  using D5 = Dual<kMaxSeedParams + 1>;
  const int n = seed.size();
  std::array<D5, kMaxSeedParams> p;
  for (int i = 0; i < n; ++i) p[i] = D5::variable(seed[i], i);
  const D5 l = D5::variable(leb, n);
  std::array<D5, kMaxSeedParams> out;
  basis_scale_t<D5>(seed.family(), p.data(), l, out.data());
  std::vector<double> jac(n * (n + 1));
  for (int r = 0; r < n; ++r)
    for (int c = 0; c <= n; ++c) jac[r * (n + 1) + c] = out[r].d[c];
  return jac;
}

// ---------------------------------------------------------------- gradients

std::vector<double> log_density_gradient(const Distribution& dist, double x) {
  const SeedDistribution& d = base_of(dist);
  const double ld = log_density(dist, x);
  if (!std::isfinite(ld)) throw DomainError("log_density_gradient: x outside the interior of the support");
  auto p = dual_params(d);
  auto g = grad_of(log_density_t<D4>(d.family(), p.data(), D4(x)), d.size());
  if (auto* t = std::get_if<TruncatedSeed>(&dist)) {
    const double Fb = cdf(t->base, t->upper);
    const auto gb = cdf_gradient(Distribution(t->base), t->upper);
    for (int i = 0; i < d.size(); ++i) g[i] -= gb[i] / Fb;
  }
  return g;
}

namespace {

std::vector<double> seed_cdf_gradient(const SeedDistribution& d, double x) {
  const double* p = d.params().data();
  switch (d.family()) {
    case Family::Poisson:
    case Family::NegBinomial:
    case Family::Skellam:
      throw UnsupportedError("cdf_gradient: discrete family " + family_name(d.family()));
    case Family::Uniform: {
      if (x <= p[0] || x >= p[1]) return {0.0, 0.0};
      const double w = p[1] - p[0];
      return {(x - p[1]) / (w * w), -(x - p[0]) / (w * w)};
    }
    case Family::Gaussian: {
      const double w = (x - p[0]) / p[1];
      const double ph = normal_pdf(w);
      return {-ph / p[1], -ph * w / p[1]};
    }
    case Family::DSMaxwell: {
      const double w = (x - p[0]) / p[1];
      const double dFdw = w * w * normal_pdf(w);
      return {-dFdw / p[1], -dFdw * w / p[1]};
    }
    case Family::Gamma: {
      if (x <= 0) return {0.0, 0.0};
      double v, da;
      gamma_p_with_shape_derivative(p[0], p[1] * x, v, da);
      return {da, x * density(d, x) / p[1]};
    }
    case Family::Beta: {
      if (x <= 0 || x >= 1) return {0.0, 0.0};
      double v, da, db;
      inc_beta_with_shape_derivatives(p[0], p[1], x, v, da, db);
      return {da, db};
    }
    case Family::InvGaussian: {
      if (x <= 0) return {0.0, 0.0};
      const double mu = p[0], lam = p[1];
      const double s = std::sqrt(lam / x);
      const double a = s * (x / mu - 1.0);
      const double b = -s * (x / mu + 1.0);
      const double e = std::exp(2.0 * lam / mu + normal_log_cdf(b));
      return {-(2.0 * lam / (mu * mu)) * e, -normal_pdf(a) * s / lam + (2.0 / mu) * e};
    }
    case Family::NIG:
      return cdf_gradient_numeric(Distribution(d), x);
  }
  throw ConsistencyError("cdf_gradient: unknown family");
}

}  // namespace

std::vector<double> cdf_gradient(const Distribution& dist, double x) {
  if (auto* s = std::get_if<SeedDistribution>(&dist)) return seed_cdf_gradient(*s, x);
  const auto& t = std::get<TruncatedSeed>(dist);
  const int n = t.base.size();
  if (x >= t.upper) return std::vector<double>(n, 0.0);
  const double Fb = cdf(t.base, t.upper), Fx = cdf(t.base, x);
  const auto gb = seed_cdf_gradient(t.base, t.upper);
  const auto gx = seed_cdf_gradient(t.base, x);
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = gx[i] / Fb - Fx * gb[i] / (Fb * Fb);
  return g;
}

std::vector<double> cdf_gradient_numeric(const Distribution& dist, double x) {
  const SeedDistribution& d = base_of(dist);
  const int n = d.size();
  std::vector<double> g(n);
  auto with = [&](int i, double v) {
    std::vector<double> p = d.param_vector();
    p[i] = v;
    SeedDistribution b(d.family(), p);
    if (auto* t = std::get_if<TruncatedSeed>(&dist)) return cdf(Distribution(TruncatedSeed(b, t->upper)), x);
    return cdf(b, x);
  };
  for (int i = 0; i < n; ++i) {
    const double h = 1e-4 * std::max(1.0, std::fabs(d[i]));
    auto D = [&](double hh) { return (with(i, d[i] + hh) - with(i, d[i] - hh)) / (2.0 * hh); };
    g[i] = (4.0 * D(0.5 * h) - D(h)) / 3.0;
  }
  return g;
}

std::vector<double> pathwise_gradient(const Distribution& dist, double z) {
  const SeedDistribution& d = base_of(dist);
  if (d.discrete()) throw UnsupportedError("pathwise_gradient: discrete family");
  if (d.family() == Family::Gaussian && std::holds_alternative<SeedDistribution>(dist))
    return {1.0, (z - d[0]) / d[1]};
  const double q = density(dist, z);
  if (!(q > 0.0) || !std::isfinite(q)) throw DomainError("pathwise_gradient: z at the boundary of the support");
  auto g = cdf_gradient(dist, z);
  for (auto& v : g) v = -v / q;
  return g;
}

int base_dim(const Distribution& d) {
  if (auto* s = std::get_if<SeedDistribution>(&d))
    if (s->family() == Family::NIG) return 2;
  return 1;
}

double reparam_draw(const Distribution& dist, std::span<const double> u, std::span<double> grad) {
  const SeedDistribution& d = base_of(dist);
  const int n = d.size();
  if (static_cast<int>(grad.size()) < n) throw DomainError("reparam_draw: gradient buffer too small");
  if (d.family() == Family::NIG && std::holds_alternative<SeedDistribution>(dist)) {
    const double al = d[0], be = d[1], de = d[2];
    const double g = d.nig_gamma();
    const SeedDistribution mix = SeedDistribution::inv_gaussian(de / g, de * de);
    const double v = quantile(mix, u[0]);
    const double eps = normal_quantile(u[1]);
    const double sv = std::sqrt(v);
    const double z = d[3] + be * v + sv * eps;
    const auto gv = pathwise_gradient(Distribution(mix), v);
    const double g3 = g * g * g;
    // d(mean)/d(alpha, beta, delta), d(shape)/d(delta)
    const double dm[3] = {-de * al / g3, de * be / g3, 1.0 / g};
    const double dvd[3] = {gv[0] * dm[0], gv[0] * dm[1], gv[0] * dm[2] + gv[1] * 2.0 * de};
    const double dzdv = be + eps / (2.0 * sv);
    grad[0] = dzdv * dvd[0];
    grad[1] = dzdv * dvd[1] + v;
    grad[2] = dzdv * dvd[2];
    grad[3] = 1.0;
    return z;
  }
  if (d.family() == Family::Beta && std::holds_alternative<SeedDistribution>(dist)) {
    const double z = inc_beta_inv(d[0], d[1], u[0]);
    if (!(z > 0.0 && z < 1.0)) {
      grad[0] = grad[1] = 0.0;
      return z;
    }
    double v, da, db;
    inc_beta_with_shape_derivatives(d[0], d[1], z, v, da, db);
    const double q = density(d, z);
    if (!(q > 0.0) || !std::isfinite(q)) {
      grad[0] = grad[1] = 0.0;
      return z;
    }
    grad[0] = -da / q;
    grad[1] = -db / q;
    return z;
  }
  const double z = quantile(dist, u[0]);
  const auto g = pathwise_gradient(dist, z);
  for (int i = 0; i < n; ++i) grad[i] = g[i];
  return z;
}

}  // namespace trawl
