#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "trawl/rng.hpp"

namespace trawl {

enum class Family { Poisson, NegBinomial, Skellam, Uniform, Beta, Gamma, InvGaussian, Gaussian, DSMaxwell, NIG };

inline constexpr int kMaxSeedParams = 4;

int param_count(Family f);
std::string family_name(Family f);
Family family_from_name(const std::string& name);
std::vector<std::string> param_names(Family f);
bool is_discrete(Family f);
bool is_positive_support(Family f);
// Families closed under Levy-basis scaling.
bool is_basis_family(Family f);

// Parameters:
//   Poisson(lambda) NegBinomial(m, p) Skellam(mu1, mu2) Uniform(a, b)
//   Beta(alpha, beta) Gamma(alpha shape, beta rate) InvGaussian(mu mean, lambda shape)
//   Gaussian(mu, sigma) DSMaxwell(mu, sigma) NIG(alpha, beta, delta, mu)
class SeedDistribution {
 public:
  SeedDistribution(Family f, std::span<const double> params);
  SeedDistribution(Family f, std::initializer_list<double> params);

  static SeedDistribution poisson(double lambda) { return {Family::Poisson, {lambda}}; }
  static SeedDistribution negbinomial(double m, double p) { return {Family::NegBinomial, {m, p}}; }
  static SeedDistribution skellam(double mu1, double mu2) { return {Family::Skellam, {mu1, mu2}}; }
  static SeedDistribution uniform(double a, double b) { return {Family::Uniform, {a, b}}; }
  static SeedDistribution beta(double a, double b) { return {Family::Beta, {a, b}}; }
  static SeedDistribution gamma(double shape, double rate) { return {Family::Gamma, {shape, rate}}; }
  static SeedDistribution inv_gaussian(double mu, double lambda) { return {Family::InvGaussian, {mu, lambda}}; }
  static SeedDistribution gaussian(double mu, double sigma) { return {Family::Gaussian, {mu, sigma}}; }
  static SeedDistribution dsmaxwell(double mu, double sigma) { return {Family::DSMaxwell, {mu, sigma}}; }
  static SeedDistribution nig(double alpha, double beta, double delta, double mu) {
    return {Family::NIG, {alpha, beta, delta, mu}};
  }

  Family family() const { return family_; }
  int size() const { return param_count(family_); }
  double operator[](int i) const { return params_[i]; }
  std::span<const double> params() const { return {params_.data(), static_cast<std::size_t>(size())}; }
  std::vector<double> param_vector() const { return {params_.begin(), params_.begin() + size()}; }
  bool discrete() const { return is_discrete(family_); }
  // NIG only: sqrt(alpha^2 - beta^2).
  double nig_gamma() const { return gamma_; }

 private:
  Family family_;
  std::array<double, kMaxSeedParams> params_{};
  double gamma_ = 0.0;
};

// Restriction of a positive continuous law to (0, upper].
struct TruncatedSeed {
  TruncatedSeed(SeedDistribution base, double upper);
  SeedDistribution base;
  double upper;
};

using Distribution = std::variant<SeedDistribution, TruncatedSeed>;

const SeedDistribution& base_of(const Distribution& d);
int param_count(const Distribution& d);

double density(const SeedDistribution& d, double x);
double log_density(const SeedDistribution& d, double x);
double density(const Distribution& d, double x);
double log_density(const Distribution& d, double x);
// d/dx log density (continuous families).
double log_density_dx(const SeedDistribution& d, double x);

double cdf(const SeedDistribution& d, double x);
double cdf(const Distribution& d, double x);
double quantile(const SeedDistribution& d, double u);
double quantile(const Distribution& d, double u);

double sample(const SeedDistribution& d, Rng& rng);
double sample(const Distribution& d, Rng& rng);
std::vector<double> sample(const Distribution& d, Rng& rng, std::size_t n);

double mean(const SeedDistribution& d);
double variance(const SeedDistribution& d);
// E[Z^l].
double raw_moment(const SeedDistribution& d, int l);
// Gradient of E[Z^l] with respect to the native parameters.
std::vector<double> moment_gradient(const SeedDistribution& d, int l);
// Central moment E[(Z - c)^l] for a fixed c, and its gradient with c held fixed.
double shifted_moment(const SeedDistribution& d, int l, double c);
std::vector<double> shifted_moment_gradient(const SeedDistribution& d, int l, double c);
bool has_moments(const Distribution& d);

// Law of L(A) with Leb(A) = leb.
SeedDistribution basis_scale(const SeedDistribution& seed, double leb);
// Jacobian of basis_scale parameters: rows are output parameters, columns are
// (seed parameters..., leb). Row-major, size n x (n+1).
std::vector<double> basis_scale_jacobian(const SeedDistribution& seed, double leb);

// Score: gradient of log density in the native parameters.
std::vector<double> log_density_gradient(const Distribution& d, double x);
// Gradient of the CDF in the native parameters.
std::vector<double> cdf_gradient(const Distribution& d, double x);
// Richardson-extrapolated central differences of the CDF.
std::vector<double> cdf_gradient_numeric(const Distribution& d, double x);
// Implicit reparameterization gradient dz/dparams = -grad F(z) / q(z).
std::vector<double> pathwise_gradient(const Distribution& d, double z);

// Number of base uniforms consumed by reparam_draw.
int base_dim(const Distribution& d);
// Draw z from base uniforms and return its gradient in the native parameters.
// NIG uses its normal variance-mean mixture (inverse Gaussian stage, then
// Gaussian stage); other families use inversion.
double reparam_draw(const Distribution& d, std::span<const double> u, std::span<double> grad);

}  // namespace trawl
