#include "trawl/model.hpp"

#include <cmath>

#include "trawl/error.hpp"

namespace trawl {

std::vector<double> ModelSpec::theta() const {
  auto t = seed.param_vector();
  t.insert(t.end(), trawl.params().begin(), trawl.params().end());
  return t;
}

std::vector<std::string> ModelSpec::param_names() const {
  auto n = trawl::param_names(seed.family());
  for (const auto& s : trawl.param_names()) n.push_back(s);
  return n;
}

ModelSpec ModelSpec::with_theta(std::span<const double> theta) const {
  if (static_cast<int>(theta.size()) != size()) throw DomainError("with_theta: wrong parameter count");
  const int k = seed_size();
  return {SeedDistribution(seed.family(), theta.subspan(0, k)), trawl.with_params(theta.subspan(k))};
}

std::vector<ParamDomain> param_domains(const ModelSpec& m) {
  std::vector<ParamDomain> d;
  switch (m.seed.family()) {
    case Family::NegBinomial:
      d = {ParamDomain::Positive, ParamDomain::UnitInterval};
      break;
    case Family::Uniform:
      d = {ParamDomain::Real, ParamDomain::Real};
      break;
    case Family::Gaussian:
    case Family::DSMaxwell:
      d = {ParamDomain::Real, ParamDomain::Positive};
      break;
    case Family::NIG:
      d = {ParamDomain::Positive, ParamDomain::Real, ParamDomain::Positive, ParamDomain::Real};
      break;
    default:
      d.assign(m.seed_size(), ParamDomain::Positive);
  }
  d.insert(d.end(), m.trawl.size(), ParamDomain::Positive);
  return d;
}

std::vector<double> to_unconstrained(const ModelSpec& m, std::span<const double> theta) {
  const auto dom = param_domains(m);
  std::vector<double> u(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    switch (dom[i]) {
      case ParamDomain::Real:
        u[i] = theta[i];
        break;
      case ParamDomain::Positive:
        u[i] = std::log(theta[i]);
        break;
      case ParamDomain::UnitInterval:
        u[i] = std::log(theta[i]) - std::log1p(-theta[i]);
        break;
    }
  }
  return u;
}

std::vector<double> from_unconstrained(const ModelSpec& m, std::span<const double> u) {
  const auto dom = param_domains(m);
  std::vector<double> t(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    switch (dom[i]) {
      case ParamDomain::Real:
        t[i] = u[i];
        break;
      case ParamDomain::Positive:
        t[i] = std::exp(u[i]);
        break;
      case ParamDomain::UnitInterval:
        t[i] = 1.0 / (1.0 + std::exp(-u[i]));
        break;
    }
  }
  return t;
}

std::vector<double> unconstrained_jacobian(const ModelSpec& m, std::span<const double> u) {
  const auto t = from_unconstrained(m, u);
  const auto dom = param_domains(m);
  std::vector<double> j(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    switch (dom[i]) {
      case ParamDomain::Real:
        j[i] = 1.0;
        break;
      case ParamDomain::Positive:
        j[i] = t[i];
        break;
      case ParamDomain::UnitInterval:
        j[i] = t[i] * (1.0 - t[i]);
        break;
    }
  }
  return j;
}

}  // namespace trawl
