#include "trawl/trawl_function.hpp"

#include <cmath>
#include <limits>

#include "trawl/autodiff.hpp"
#include "trawl/error.hpp"
#include "trawl/quadrature.hpp"

namespace trawl {

namespace {

using D2 = Dual<2>;

template <class S>
S ig_phi(const S& mu, const S& lam, double t) {
  using std::exp;
  using std::sqrt;
  const S r = 1.0 - 2.0 * mu * mu * t / lam;
  return exp((lam / mu) * (1.0 - sqrt(r))) / sqrt(r);
}

template <class S>
S two_param_acf(TrawlKind k, const S& a, const S& b, double h) {
  using std::exp;
  using std::pow;
  using std::sqrt;
  if (k == TrawlKind::InvGaussian) return exp(-(b / a) * (sqrt(1.0 + 2.0 * a * a * h / b) - 1.0));
  return pow(1.0 + h / b, -a);
}

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string("trawl function: ") + what + " must be positive");
}

const QuadOptions kAreaQuad{0.0, 1e-12, 4000};

}  // namespace

std::string trawl_name(TrawlKind k) {
  switch (k) {
    case TrawlKind::Exponential:
      return "exponential";
    case TrawlKind::SupExponential:
      return "supexponential";
    case TrawlKind::InvGaussian:
      return "invgaussian";
    case TrawlKind::Gamma:
      return "gamma";
  }
  return "?";
}

TrawlKind trawl_from_name(const std::string& name) {
  for (TrawlKind k : {TrawlKind::Exponential, TrawlKind::SupExponential, TrawlKind::InvGaussian, TrawlKind::Gamma})
    if (trawl_name(k) == name) return k;
  throw DomainError("unknown trawl function '" + name + "'");
}

TrawlFunction::TrawlFunction(TrawlKind k, std::vector<double> p, std::vector<double> w)
    : kind_(k), p_(std::move(p)), w_(std::move(w)) {
  for (double v : p_) check_positive(v, "parameters");
  if (k == TrawlKind::SupExponential) {
    if (w_.size() != p_.size() || w_.empty())
      throw DomainError("superposition trawl: weights and rates must have equal nonzero length");
    double s = 0.0;
    for (double v : w_) {
      if (!(v >= 0.0)) throw DomainError("superposition trawl: weights must be nonnegative");
      s += v;
    }
    if (std::fabs(s - 1.0) > 1e-10) throw DomainError("superposition trawl: weights must sum to 1");
  }
}

TrawlFunction TrawlFunction::exponential(double lambda) { return {TrawlKind::Exponential, {lambda}, {}}; }
TrawlFunction TrawlFunction::sup_exponential(std::vector<double> weights, std::vector<double> rates) {
  return {TrawlKind::SupExponential, std::move(rates), std::move(weights)};
}
TrawlFunction TrawlFunction::inv_gaussian(double mu, double lambda) { return {TrawlKind::InvGaussian, {mu, lambda}, {}}; }
TrawlFunction TrawlFunction::gamma(double H, double delta) { return {TrawlKind::Gamma, {H, delta}, {}}; }

std::vector<std::string> TrawlFunction::param_names() const {
  switch (kind_) {
    case TrawlKind::Exponential:
      return {"lambda"};
    case TrawlKind::SupExponential: {
      std::vector<std::string> n;
      for (std::size_t j = 0; j < p_.size(); ++j) n.push_back("lambda" + std::to_string(j + 1));
      return n;
    }
    case TrawlKind::InvGaussian:
      return {"mu", "lambda"};
    case TrawlKind::Gamma:
      return {"H", "delta"};
  }
  return {};
}

TrawlFunction TrawlFunction::with_params(std::span<const double> p) const {
  if (p.size() != p_.size()) throw DomainError("trawl function: wrong number of parameters");
  return {kind_, std::vector<double>(p.begin(), p.end()), w_};
}

double phi(const TrawlFunction& tf, double t) {
  if (t > 0.0) throw DomainError("phi: t must be <= 0");
  switch (tf.kind()) {
    case TrawlKind::Exponential:
      return std::exp(tf[0] * t);
    case TrawlKind::SupExponential: {
      double s = 0.0;
      for (int j = 0; j < tf.size(); ++j) s += tf.weights()[j] * std::exp(tf[j] * t);
      return s;
    }
    case TrawlKind::InvGaussian:
      return ig_phi(tf[0], tf[1], t);
    case TrawlKind::Gamma:
      return std::pow(1.0 - t / tf[1], -(tf[0] + 1.0));
  }
  return 0.0;
}

double total_area(const TrawlFunction& tf) {
  switch (tf.kind()) {
    case TrawlKind::Exponential:
      return 1.0 / tf[0];
    case TrawlKind::SupExponential: {
      double s = 0.0;
      for (int j = 0; j < tf.size(); ++j) s += tf.weights()[j] / tf[j];
      return s;
    }
    case TrawlKind::InvGaussian: {
      const double mu = tf[0], lam = tf[1];
      const auto r = integrate([&](double t) { return ig_phi(mu, lam, t); },
                               -std::numeric_limits<double>::infinity(), 0.0, kAreaQuad);
      return r.value;
    }
    case TrawlKind::Gamma:
      return tf[1] / tf[0];
  }
  return 0.0;
}

std::vector<double> area_gradient(const TrawlFunction& tf) {
  switch (tf.kind()) {
    case TrawlKind::Exponential:
      return {-1.0 / (tf[0] * tf[0])};
    case TrawlKind::SupExponential: {
      std::vector<double> g(tf.size());
      for (int j = 0; j < tf.size(); ++j) g[j] = -tf.weights()[j] / (tf[j] * tf[j]);
      return g;
    }
    case TrawlKind::InvGaussian: {
      std::vector<double> g(2);
      for (int i = 0; i < 2; ++i) {
        const auto r = integrate(
            [&](double t) { return ig_phi(D2::variable(tf[0], 0), D2::variable(tf[1], 1), t).d[i]; },
            -std::numeric_limits<double>::infinity(), 0.0, kAreaQuad);
        g[i] = r.value;
      }
      return g;
    }
    case TrawlKind::Gamma:
      return {-tf[1] / (tf[0] * tf[0]), 1.0 / tf[0]};
  }
  return {};
}

double acf(const TrawlFunction& tf, double h) {
  if (!(h >= 0.0)) throw DomainError("acf: lag must be nonnegative");
  switch (tf.kind()) {
    case TrawlKind::Exponential:
      return std::exp(-tf[0] * h);
    case TrawlKind::SupExponential: {
      double num = 0.0, den = 0.0;
      for (int j = 0; j < tf.size(); ++j) {
        const double c = tf.weights()[j] / tf[j];
        num += c * std::exp(-tf[j] * h);
        den += c;
      }
      return num / den;
    }
    case TrawlKind::InvGaussian:
    case TrawlKind::Gamma:
      return two_param_acf(tf.kind(), tf[0], tf[1], h);
  }
  return 0.0;
}

std::vector<double> acf_gradient(const TrawlFunction& tf, double h) {
  if (!(h >= 0.0)) throw DomainError("acf_gradient: lag must be nonnegative");
  switch (tf.kind()) {
    case TrawlKind::Exponential:
      return {-h * std::exp(-tf[0] * h)};
    case TrawlKind::SupExponential: {
      double num = 0.0, den = 0.0;
      const int J = tf.size();
      std::vector<double> c(J), e(J);
      for (int j = 0; j < J; ++j) {
        c[j] = tf.weights()[j] / tf[j];
        e[j] = std::exp(-tf[j] * h);
        num += c[j] * e[j];
        den += c[j];
      }
      std::vector<double> g(J);
      for (int j = 0; j < J; ++j) {
        const double dc = -c[j] / tf[j];
        const double dnum = dc * e[j] - h * c[j] * e[j];
        g[j] = (dnum * den - num * dc) / (den * den);
      }
      return g;
    }
    case TrawlKind::InvGaussian:
    case TrawlKind::Gamma: {
      const D2 r = two_param_acf(tf.kind(), D2::variable(tf[0], 0), D2::variable(tf[1], 1), h);
      return {r.d[0], r.d[1]};
    }
  }
  return {};
}

SliceTriple pair_slices(const TrawlFunction& tf, double h) {
  const double leb = total_area(tf);
  const double r = acf(tf, h);
  return {r * leb, (1.0 - r) * leb, (1.0 - r) * leb, h};
}

SliceGradient pair_slices_gradient(const TrawlFunction& tf, double h) {
  const double leb = total_area(tf);
  const double r = acf(tf, h);
  const auto dl = area_gradient(tf);
  const auto dr = acf_gradient(tf, h);
  SliceGradient g;
  for (int i = 0; i < tf.size(); ++i) {
    g.common.push_back(dr[i] * leb + r * dl[i]);
    g.left.push_back(-dr[i] * leb + (1.0 - r) * dl[i]);
  }
  return g;
}

SliceTable grid_slice_areas(const TrawlFunction& tf, int n, double tau) {
  if (n < 1) throw DomainError("grid_slice_areas: n must be >= 1");
  if (!(tau > 0.0)) throw DomainError("grid_slice_areas: spacing must be positive");
  const double leb = total_area(tf);
  std::vector<double> rho(n + 2);
  for (int k = 0; k <= n + 1; ++k) rho[k] = acf(tf, k * tau);
  std::vector<double> a(static_cast<std::size_t>(n) * (n + 1) / 2);
  SliceTable idx(n, {});
  for (int b = 1; b <= n; ++b) {
    for (int d = b; d <= n; ++d) {
      double v;
      if (b == 1) {
        v = d == n ? leb * rho[n - 1] : leb * (rho[d - 1] - rho[d]);
      } else {
        const int k = d - b;
        v = d == n ? leb * (rho[k] - rho[k + 1]) : leb * ((rho[k] - rho[k + 1]) - (rho[k + 1] - rho[k + 2]));
      }
      if (v < -1e-12) throw ConsistencyError("grid_slice_areas: negative slice area");
      a[idx.index(b, d)] = std::max(v, 0.0);
    }
  }
  return {n, std::move(a)};
}

}  // namespace trawl
