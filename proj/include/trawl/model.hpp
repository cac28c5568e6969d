#pragma once

#include <span>
#include <string>
#include <vector>

#include "trawl/dist.hpp"
#include "trawl/trawl_function.hpp"

namespace trawl {

// theta = (seed parameters, free trawl parameters).
struct ModelSpec {
  SeedDistribution seed;
  TrawlFunction trawl;

  int seed_size() const { return seed.size(); }
  int size() const { return seed.size() + trawl.size(); }
  std::vector<double> theta() const;
  std::vector<std::string> param_names() const;
  ModelSpec with_theta(std::span<const double> theta) const;
  double area() const { return total_area(trawl); }
  // Law of X_t.
  SeedDistribution marginal() const { return basis_scale(seed, area()); }
};

enum class ParamDomain { Real, Positive, UnitInterval };
std::vector<ParamDomain> param_domains(const ModelSpec& m);

// Unconstrained coordinates: log for positive parameters, logit for (0,1).
std::vector<double> to_unconstrained(const ModelSpec& m, std::span<const double> theta);
std::vector<double> from_unconstrained(const ModelSpec& m, std::span<const double> u);
// d theta_i / d u_i.
std::vector<double> unconstrained_jacobian(const ModelSpec& m, std::span<const double> u);

}  // namespace trawl
