#include "trawl/cv.hpp"

#include <algorithm>
#include <cmath>

#include "trawl/error.hpp"
#include "trawl/kernels.hpp"

namespace trawl {

double TaylorCV::operator()(double z) const {
  double p = 0.0;
  kernels::scalar::taylor_eval(c.data(), degree, z0, &z, 1, &p, nullptr);
  return p;
}

TaylorCV build_taylor(const Problem& p, double z0, int m) {
  if (m < 1) throw DomainError("Taylor control variate degree must be at least 1");
  if (m > kMaxCvDegree) throw UnsupportedError("Taylor control variate degree above " + std::to_string(kMaxCvDegree));
  TaylorCV t;
  t.degree = m;
  t.z0 = z0;
  t.dim = p.dim();
  t.c.resize(m + 1);
  t.cg.resize((m + 1) * t.dim);
  p.taylor(z0, m, t.c.data(), t.cg.data());
  for (double v : t.c)
    if (!std::isfinite(v)) throw DomainError("Taylor coefficients are not finite at the expansion point");
  return t;
}

double default_expansion_point(const Distribution& q) {
  const SeedDistribution& b = base_of(q);
  const double m = mean(b);
  if (auto* t = std::get_if<TruncatedSeed>(&q)) return std::clamp(m, 0.0, t->upper) * (1.0 - 1e-9);
  return m;
}

GammaEstimate optimal_gamma(std::span<const double> f, std::span<const double> h) {
  if (f.size() != h.size() || f.size() < 2) throw DomainError("optimal_gamma: need two or more paired samples");
  const std::size_t n = f.size();
  const double mf = kernels::sum(f.data(), n) / double(n);
  const double mh = kernels::sum(h.data(), n) / double(n);
  const double vh = kernels::centered_dot(h.data(), mh, h.data(), mh, n);
  const double vf = kernels::centered_dot(f.data(), mf, f.data(), mf, n);
  const double cfh = kernels::centered_dot(f.data(), mf, h.data(), mh, n);
  GammaEstimate g;
  if (!(vh > 0.0) || !std::isfinite(vh)) {
    g.degenerate = true;
    return g;
  }
  g.gamma = cfh / vh;
  g.residual_factor = vf > 0.0 ? std::max(0.0, 1.0 - cfh * cfh / (vf * vh)) : 0.0;
  return g;
}

namespace {

template <class V>
void drop_front(V& v, std::size_t k) {
  if (v.size() >= k) v.erase(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k));
}

// x <- x - gamma (h - c)
void adjust(std::vector<double>& x, const std::vector<double>& h, double gamma, double c) {
  if (gamma == 0.0) return;
  kernels::axpy(-gamma, h.data(), x.data(), x.size());
  const double shift = gamma * c;
  for (double& v : x) v += shift;
}

}  // namespace

CvReport apply_control_variates(const Problem& p, SampleSet& s, const CvOptions& opts) {
  CvReport rep;
  const int dim = s.dim;
  rep.gamma1.assign(dim, 0.0);
  rep.gamma2.assign(dim, 0.0);
  if (opts.degree == 0) return rep;
  if (s.kind != Estimator::SF && s.kind != Estimator::PG)
    throw UnsupportedError(std::string("control variates are not available for the ") + estimator_name(s.kind) +
                           " estimator");
  const Distribution& qd = p.q();
  const double z0 = opts.z0 ? *opts.z0 : default_expansion_point(qd);
  rep.taylor = build_taylor(p, z0, opts.degree);
  if (!has_moments(qd)) {
    rep.moments_unavailable = true;
    return rep;
  }
  const SeedDistribution& q = std::get<SeedDistribution>(qd);
  const TaylorCV& t = rep.taylor;
  const int m = t.degree;
  const int nq = q.size();
  const auto& jq = p.q_jacobian();

  // Shifted moments and their theta-gradients.
  std::vector<double> M(m + 1, 0.0), gM((m + 1) * dim, 0.0);
  for (int l = 1; l <= m; ++l) {
    M[l] = shifted_moment(q, l, z0);
    const auto g = shifted_moment_gradient(q, l, z0);
    for (int j = 0; j < dim; ++j) {
      double v = 0.0;
      for (int k = 0; k < nq; ++k) v += jq[k * dim + j] * g[k];
      gM[l * dim + j] = v;
    }
  }
  double c0 = 0.0;
  std::vector<double> c1(dim, 0.0), c2(dim, 0.0);
  for (int l = 1; l <= m; ++l) {
    c0 += t.c[l] * M[l];
    for (int j = 0; j < dim; ++j) {
      c1[j] += t.cg[l * dim + j] * M[l];
      c2[j] += t.c[l] * gM[l * dim + j];
    }
  }

  const std::size_t n = s.n;
  std::size_t k_pilot = n;
  if (opts.pilot) {
    k_pilot = static_cast<std::size_t>(std::floor(opts.pilot_fraction * double(n)));
    if (k_pilot < 2 || n - k_pilot < 2) throw DomainError("pilot split leaves fewer than two samples");
  }
  auto gamma_of = [&](const std::vector<double>& f, const std::vector<double>& h) {
    if (opts.fixed_gamma) return GammaEstimate{*opts.fixed_gamma, 1.0, false};
    return optimal_gamma(std::span<const double>(f.data(), k_pilot), std::span<const double>(h.data(), k_pilot));
  };

  std::vector<double> T(n), dT(n), h(n), cj(m + 1, 0.0);
  kernels::taylor_eval(t.c.data(), m, z0, s.z.data(), n, T.data(), dT.data());
  const auto g0 = gamma_of(s.u, T);
  rep.gamma0 = g0.gamma;
  rep.residual_factor0 = g0.residual_factor;

  for (int j = 0; j < dim; ++j) {
    for (int l = 1; l <= m; ++l) cj[l] = t.cg[l * dim + j];
    kernels::taylor_eval(cj.data(), m, z0, s.z.data(), n, h.data(), nullptr);
    const auto g1 = gamma_of(s.b[j], h);
    rep.gamma1[j] = g1.gamma;
    adjust(s.b[j], h, g1.gamma, c1[j]);

    const std::vector<double>& base = s.kind == Estimator::PG ? dT : T;
    for (std::size_t i = 0; i < n; ++i) h[i] = base[i] * s.w[j][i];
    const auto g2 = gamma_of(s.a[j], h);
    rep.gamma2[j] = g2.gamma;
    adjust(s.a[j], h, g2.gamma, c2[j]);
  }
  adjust(s.u, T, g0.gamma, c0);

  if (opts.pilot) {
    drop_front(s.z, k_pilot);
    drop_front(s.u, k_pilot);
    drop_front(s.dfdz, k_pilot);
    for (auto& v : s.a) drop_front(v, k_pilot);
    for (auto& v : s.b) drop_front(v, k_pilot);
    for (auto& v : s.w) drop_front(v, k_pilot);
    s.n = n - k_pilot;
    rep.pilot_samples = k_pilot;
  }
  return rep;
}

CvEstimate cv_density_estimate(const Problem& p, std::size_t n, Rng& rng, const CvOptions& opts) {
  return cv_gradient_estimate(p, n, rng, base_of(p.q()).discrete() ? Estimator::SF : Estimator::PG, opts);
}

CvEstimate cv_gradient_estimate(const Problem& p, std::size_t n, Rng& rng, Estimator engine, const CvOptions& opts) {
  const BaseSamples base = draw_base(n, rng);
  SampleSet s = estimator_samples(engine, p, base);
  CvEstimate e;
  e.report = apply_control_variates(p, s, opts);
  e.value = summarize_value(s);
  e.gradient = summarize_gradient(s);
  return e;
}

}  // namespace trawl
