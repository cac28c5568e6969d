#include "trawl/mcgrad.hpp"

#include <cmath>
#include <numbers>

#include "trawl/error.hpp"
#include "trawl/kernels.hpp"
#include "trawl/special.hpp"

namespace trawl {

namespace {

SampleSet make_set(Estimator kind, int dim, std::size_t n) {
  SampleSet s;
  s.kind = kind;
  s.dim = dim;
  s.n = n;
  s.z.resize(n);
  s.u.resize(n);
  s.a.assign(dim, std::vector<double>(n, 0.0));
  s.b.assign(dim, std::vector<double>(n, 0.0));
  return s;
}

// out[j] = sum_k J[k, j] g[k]
void chain_q(const std::vector<double>& jq, int nq, int dim, const double* g, double* out) {
  if (static_cast<int>(jq.size()) != nq * dim) throw ConsistencyError("q_jacobian has the wrong size");
  for (int j = 0; j < dim; ++j) {
    double s = 0.0;
    for (int k = 0; k < nq; ++k) s += jq[k * dim + j] * g[k];
    out[j] = s;
  }
}

void fill_value_and_grad(const Problem& p, SampleSet& s, std::size_t i, double z, std::vector<double>& buf) {
  s.z[i] = z;
  s.u[i] = p.f_grad(z, buf.data());
  for (int j = 0; j < s.dim; ++j) s.b[j][i] = buf[j];
}

double mean_of(const std::vector<double>& x) { return kernels::sum(x.data(), x.size()) / double(x.size()); }

double var_of(const std::vector<double>& x, double m) {
  if (x.size() < 2) return 0.0;
  return kernels::centered_dot(x.data(), m, x.data(), m, x.size()) / double(x.size() - 1);
}

}  // namespace

BaseSamples draw_base(std::size_t n, Rng& rng) {
  BaseSamples b;
  b.n = n;
  b.u.resize(n * kBaseDim);
  for (auto& v : b.u) v = rng.uniform();
  return b;
}

double draw_value(const Distribution& q, const double* u) {
  if (base_dim(q) == 2) {
    double g[kMaxSeedParams];
    return reparam_draw(q, std::span<const double>(u, 2), std::span<double>(g, kMaxSeedParams));
  }
  return quantile(q, u[0]);
}

const char* estimator_name(Estimator e) {
  switch (e) {
    case Estimator::SF: return "sf";
    case Estimator::PG: return "pg";
    case Estimator::MVG: return "mvg";
    case Estimator::Hybrid: return "hybrid";
    case Estimator::FD: return "fd";
  }
  return "?";
}

Estimator estimator_from_name(const std::string& name) {
  for (Estimator e : {Estimator::SF, Estimator::PG, Estimator::MVG, Estimator::Hybrid, Estimator::FD})
    if (name == estimator_name(e)) return e;
  throw DomainError("unknown estimator: " + name);
}

Draws make_draws(Estimator kind, const Distribution& q, const BaseSamples& base) {
  if (kind != Estimator::PG && kind != Estimator::SF) throw DomainError("make_draws: PG or SF only");
  if (kind == Estimator::PG && base_of(q).discrete())
    throw UnsupportedError("pathwise estimator needs a continuous q; use mvg or hybrid");
  const int nq = param_count(q);
  Draws d;
  d.kind = kind;
  d.n = base.n;
  d.z.resize(base.n);
  d.g.assign(nq, std::vector<double>(base.n, 0.0));
  const int bd = base_dim(q);
  std::vector<double> gz(kMaxSeedParams);
  for (std::size_t i = 0; i < base.n; ++i) {
    const double* u = base.row(i);
    double z;
    if (kind == Estimator::SF) {
      z = draw_value(q, u);
      gz = log_density_gradient(q, z);
    } else if (bd == 2) {
      z = reparam_draw(q, std::span<const double>(u, bd), gz);
    } else {
      z = quantile(q, u[0]);
      // A quantile rounded onto the edge of the support has zero sensitivity.
      const double dens = density(q, z);
      if (dens > 0.0 && std::isfinite(dens))
        gz = pathwise_gradient(q, z);
      else
        std::fill(gz.begin(), gz.end(), 0.0);
    }
    d.z[i] = z;
    for (int k = 0; k < nq; ++k) d.g[k][i] = gz[k];
  }
  return d;
}

SampleSet samples_from_draws(const Problem& p, const Draws& d) {
  const int dim = p.dim();
  const int nq = param_count(p.q());
  if (static_cast<int>(d.g.size()) != nq) throw ConsistencyError("draws do not match q");
  SampleSet s = make_set(d.kind, dim, d.n);
  s.w.assign(dim, std::vector<double>(d.n));
  const bool pg = d.kind == Estimator::PG;
  if (pg) s.dfdz.resize(d.n);
  std::vector<double> buf(dim), wj(dim), g(nq);
  for (std::size_t i = 0; i < d.n; ++i) {
    const double z = d.z[i];
    fill_value_and_grad(p, s, i, z, buf);
    for (int k = 0; k < nq; ++k) g[k] = d.g[k][i];
    chain_q(p.q_jacobian(), nq, dim, g.data(), wj.data());
    double scale = s.u[i];
    if (pg) {
      p.f_dz(z, scale);
      s.dfdz[i] = scale;
    }
    for (int j = 0; j < dim; ++j) {
      s.w[j][i] = wj[j];
      s.a[j][i] = scale * wj[j];
    }
  }
  return s;
}

SampleSet value_samples(const Problem& p, const BaseSamples& base) {
  SampleSet s = make_set(Estimator::PG, p.dim(), base.n);
  s.w.assign(p.dim(), std::vector<double>(base.n, 0.0));
  for (std::size_t i = 0; i < base.n; ++i) {
    s.z[i] = draw_value(p.q(), base.row(i));
    s.u[i] = p.f(s.z[i]);
  }
  return s;
}

SampleSet sf_samples(const Problem& p, const BaseSamples& base) {
  return samples_from_draws(p, make_draws(Estimator::SF, p.q(), base));
}

SampleSet pg_samples(const Problem& p, const BaseSamples& base) {
  return samples_from_draws(p, make_draws(Estimator::PG, p.q(), base));
}

WeakDerivative mvg_decompose(const SeedDistribution& q, int component) {
  if (component < 0 || component >= q.size()) throw DomainError("mvg_decompose: component out of range");
  WeakDerivative w;
  switch (q.family()) {
    case Family::Poisson:
    case Family::Skellam: {
      const double shift = (q.family() == Family::Skellam && component == 1) ? -1.0 : 1.0;
      w.c_plus = w.c_minus = 1.0;
      w.discrete = true;
      w.plus_density = [q, shift](double x) { return density(q, x - shift); };
      w.minus_density = [q](double x) { return density(q, x); };
      w.plus_quantile = [q, shift](double u) { return quantile(q, u) + shift; };
      w.minus_quantile = [q](double u) { return quantile(q, u); };
      return w;
    }
    case Family::Gaussian: {
      const double mu = q[0], sigma = q[1];
      if (component == 1) {
        const SeedDistribution m = SeedDistribution::dsmaxwell(mu, sigma);
        w.c_plus = w.c_minus = 1.0 / sigma;
        w.plus_density = [m](double x) { return density(m, x); };
        w.minus_density = [q](double x) { return density(q, x); };
        w.plus_quantile = [m](double u) { return quantile(m, u); };
        w.minus_quantile = [q](double u) { return quantile(q, u); };
        return w;
      }
      // Rayleigh(sigma) shifted to either side of mu.
      w.c_plus = w.c_minus = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
      auto ray = [sigma](double r) { return r <= 0.0 ? 0.0 : r / (sigma * sigma) * std::exp(-0.5 * r * r / (sigma * sigma)); };
      w.plus_density = [ray, mu](double x) { return ray(x - mu); };
      w.minus_density = [ray, mu](double x) { return ray(mu - x); };
      w.plus_quantile = [mu, sigma](double u) { return mu + sigma * std::sqrt(-2.0 * std::log1p(-u)); };
      w.minus_quantile = [mu, sigma](double u) { return mu - sigma * std::sqrt(-2.0 * std::log1p(-u)); };
      return w;
    }
    default:
      throw UnsupportedError("no measure-valued decomposition for " + family_name(q.family()));
  }
}

SampleSet mvg_samples(const Problem& p, const BaseSamples& base, bool coupled) {
  const int dim = p.dim();
  const Distribution& qd = p.q();
  if (!std::holds_alternative<SeedDistribution>(qd)) throw UnsupportedError("mvg: truncated q");
  const SeedDistribution& q = std::get<SeedDistribution>(qd);
  const int nq = q.size();
  std::vector<WeakDerivative> wd;
  for (int k = 0; k < nq; ++k) wd.push_back(mvg_decompose(q, k));
  SampleSet s = make_set(Estimator::MVG, dim, base.n);
  std::vector<double> buf(dim), g(nq), aj(dim);
  for (std::size_t i = 0; i < base.n; ++i) {
    const double* u = base.row(i);
    fill_value_and_grad(p, s, i, quantile(q, u[0]), buf);
    for (int k = 0; k < nq; ++k) {
      const double zp = wd[k].plus_quantile(u[0]);
      const double zm = wd[k].minus_quantile(coupled ? u[0] : u[1]);
      g[k] = wd[k].c_plus * p.f(zp) - wd[k].c_minus * p.f(zm);
    }
    chain_q(p.q_jacobian(), nq, dim, g.data(), aj.data());
    for (int j = 0; j < dim; ++j) s.a[j][i] = aj[j];
  }
  return s;
}

SampleSet hybrid_samples(const Problem& p, const BaseSamples& base) {
  const int dim = p.dim();
  const Distribution& qd = p.q();
  const SeedDistribution& q = base_of(qd);
  if (q.family() != Family::NegBinomial || !std::holds_alternative<SeedDistribution>(qd))
    throw UnsupportedError("hybrid estimator is implemented for the negative binomial");
  const double m = q[0], pp = q[1];
  SampleSet s = make_set(Estimator::Hybrid, dim, base.n);
  std::vector<double> buf(dim), aj(dim);
  if (pp <= 0.0) {
    // Point mass at 0; the mixing gradient dY/dp has mean m.
    for (std::size_t i = 0; i < base.n; ++i) {
      fill_value_and_grad(p, s, i, 0.0, buf);
      const double g[2] = {0.0, (p.f(1.0) - p.f(0.0)) * m};
      chain_q(p.q_jacobian(), 2, dim, g, aj.data());
      for (int j = 0; j < dim; ++j) s.a[j][i] = aj[j];
    }
    return s;
  }
  const double r = (1.0 - pp) / pp;
  const SeedDistribution mix = SeedDistribution::gamma(m, r);
  for (std::size_t i = 0; i < base.n; ++i) {
    const double* u = base.row(i);
    const double y = quantile(mix, u[0]);
    double z = 0.0;
    double dy[2] = {0.0, 0.0};
    if (y > 0.0) {
      z = quantile(SeedDistribution::poisson(y), u[1]);
      dy[0] = pathwise_gradient(Distribution(mix), y)[0];
      dy[1] = y / (r * pp * pp);
    }
    fill_value_and_grad(p, s, i, z, buf);
    const double jump = p.f(z + 1.0) - p.f(z);
    const double g[2] = {jump * dy[0], jump * dy[1]};
    chain_q(p.q_jacobian(), 2, dim, g, aj.data());
    for (int j = 0; j < dim; ++j) s.a[j][i] = aj[j];
  }
  return s;
}

SampleSet fd_samples(const Problem& p, const BaseSamples& base, double rel_step) {
  if (!(rel_step > 0.0)) throw DomainError("fd: step must be positive");
  const int dim = p.dim();
  SampleSet s = make_set(Estimator::FD, dim, base.n);
  for (std::size_t i = 0; i < base.n; ++i) {
    s.z[i] = draw_value(p.q(), base.row(i));
    s.u[i] = p.f(s.z[i]);
  }
  std::vector<double> th = p.theta();
  for (int j = 0; j < dim; ++j) {
    const double h = rel_step * std::max(1.0, std::abs(th[j]));
    const double t0 = th[j];
    th[j] = t0 + h;
    auto pp = p.at(th);
    th[j] = t0 - h;
    auto pm = p.at(th);
    th[j] = t0;
    const double inv = 1.0 / (2.0 * h);
    for (std::size_t i = 0; i < base.n; ++i) {
      const double* u = base.row(i);
      s.a[j][i] = (pp->f(draw_value(pp->q(), u)) - pm->f(draw_value(pm->q(), u))) * inv;
    }
  }
  return s;
}

SampleSet estimator_samples(Estimator e, const Problem& p, const BaseSamples& base) {
  switch (e) {
    case Estimator::SF: return sf_samples(p, base);
    case Estimator::PG: return pg_samples(p, base);
    case Estimator::MVG: return mvg_samples(p, base, true);
    case Estimator::Hybrid: return hybrid_samples(p, base);
    case Estimator::FD: return fd_samples(p, base);
  }
  throw DomainError("unknown estimator");
}

GradEstimate summarize_gradient(const SampleSet& s) {
  if (s.n < 2) throw DomainError("at least two samples are needed");
  GradEstimate g;
  g.n = s.n;
  g.value.resize(s.dim);
  g.std_error.resize(s.dim);
  std::vector<double> v(s.n);
  for (int j = 0; j < s.dim; ++j) {
    for (std::size_t i = 0; i < s.n; ++i) v[i] = s.v(j, i);
    const double m = mean_of(v);
    g.value[j] = m;
    g.std_error[j] = std::sqrt(std::max(0.0, var_of(v, m)) / double(s.n));
  }
  return g;
}

ValueEstimate summarize_value(const SampleSet& s) {
  if (s.n < 2) throw DomainError("at least two samples are needed");
  const double m = mean_of(s.u);
  return {m, std::sqrt(std::max(0.0, var_of(s.u, m)) / double(s.n))};
}

LogRatioEstimate log_ratio(const SampleSet& s) {
  if (s.n < 2) throw DomainError("at least two samples are needed");
  LogRatioEstimate r;
  r.n = s.n;
  const double N = double(s.n);
  const double mu = mean_of(s.u);
  const double vu = var_of(s.u, mu);
  r.value = mu;
  r.value_se = std::sqrt(vu / N);
  if (!(mu > 0.0)) throw EstimationError("nonpositive Monte Carlo density estimate");
  r.log_value = std::log(mu);
  r.log_se = std::sqrt(vu / N) / mu;
  r.log_bias = -vu / (2.0 * N * mu * mu);
  r.ratio.resize(s.dim);
  r.ratio_se.resize(s.dim);
  std::vector<double> v(s.n), d(s.n);
  for (int j = 0; j < s.dim; ++j) {
    for (std::size_t i = 0; i < s.n; ++i) v[i] = s.v(j, i);
    const double mv = mean_of(v);
    const double ratio = mv / mu;
    for (std::size_t i = 0; i < s.n; ++i) d[i] = v[i] - ratio * s.u[i];
    r.ratio[j] = ratio;
    r.ratio_se[j] = std::sqrt(std::max(0.0, var_of(d, mean_of(d))) / N) / mu;
  }
  return r;
}

GradEstimate sf_estimate(const Problem& p, std::size_t n, Rng& rng) {
  return summarize_gradient(sf_samples(p, draw_base(n, rng)));
}
GradEstimate pg_estimate(const Problem& p, std::size_t n, Rng& rng) {
  return summarize_gradient(pg_samples(p, draw_base(n, rng)));
}
GradEstimate mvg_estimate(const Problem& p, std::size_t n, Rng& rng, bool coupled) {
  return summarize_gradient(mvg_samples(p, draw_base(n, rng), coupled));
}
GradEstimate hybrid_estimate(const Problem& p, std::size_t n, Rng& rng) {
  return summarize_gradient(hybrid_samples(p, draw_base(n, rng)));
}
GradEstimate fd_estimate(const Problem& p, std::size_t n, Rng& rng, double rel_step) {
  return summarize_gradient(fd_samples(p, draw_base(n, rng), rel_step));
}

GradEstimate standardization_chain(const std::vector<ChainStage>& stages, const ChainIntegrand& f, int dim,
                                   std::size_t n, Rng& rng) {
  if (stages.empty()) throw DomainError("standardization_chain: no stages");
  for (const auto& st : stages)
    if (!st.draw) throw UnsupportedError("stage without a pathwise gradient; use hybrid_estimate");
  SampleSet s = make_set(Estimator::PG, dim, n);
  std::vector<double> dz(dim), part(dim), gf(dim);
  for (std::size_t i = 0; i < n; ++i) {
    double z = 0.0;
    std::fill(dz.begin(), dz.end(), 0.0);
    for (const auto& st : stages) {
      double dparent = 0.0;
      std::fill(part.begin(), part.end(), 0.0);
      z = st.draw(z, rng.uniform(), part.data(), dparent);
      for (int j = 0; j < dim; ++j) dz[j] = part[j] + dparent * dz[j];
    }
    double dfdz = 0.0;
    s.z[i] = z;
    s.u[i] = f(z, dfdz, gf.data());
    for (int j = 0; j < dim; ++j) {
      s.a[j][i] = dfdz * dz[j];
      s.b[j][i] = gf[j];
    }
  }
  return summarize_gradient(s);
}

std::vector<ChainStage> nig_chain_stages(const SeedDistribution& q) {
  if (q.family() != Family::NIG) throw DomainError("nig_chain_stages: NIG law required");
  const double al = q[0], be = q[1], de = q[2];
  const double g = q.nig_gamma();
  const SeedDistribution mix = SeedDistribution::inv_gaussian(de / g, de * de);
  const double g3 = g * g * g;
  const double dm[3] = {-de * al / g3, de * be / g3, 1.0 / g};
  ChainStage mixing{[mix, dm, de](double, double u, double* dth, double& dparent) {
    const double v = quantile(mix, u);
    const auto gv = pathwise_gradient(Distribution(mix), v);
    dth[0] = gv[0] * dm[0];
    dth[1] = gv[0] * dm[1];
    dth[2] = gv[0] * dm[2] + gv[1] * 2.0 * de;
    dparent = 0.0;
    return v;
  }};
  const double mu = q[3];
  ChainStage conditional{[mu, be](double v, double u, double* dth, double& dparent) {
    const double eps = normal_quantile(u);
    const double sv = std::sqrt(v);
    dth[1] = v;
    dth[3] = 1.0;
    dparent = be + eps / (2.0 * sv);
    return mu + be * v + sv * eps;
  }};
  return {mixing, conditional};
}

}  // namespace trawl
