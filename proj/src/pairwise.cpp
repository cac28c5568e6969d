#include "trawl/pairwise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "trawl/dist_ad.hpp"
#include "trawl/error.hpp"
#include "trawl/problem.hpp"
#include "trawl/quadrature.hpp"

namespace trawl {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Gamma seed, eta = (alpha, beta, s_c, s_l), Z ~ Beta(alpha s_c, alpha s_l):
//   f(z) = beta^(a + a1) l1^(a - 1) e^(-beta (l1 + l2)) / (G(a) G(a1)) (l2 - l1 z)^(a1 - 1) e^(beta l1 z)
// with a = alpha (s_c + s_l), a1 = alpha s_l, l1 = min(x), l2 = max(x).
struct GammaPairKernel {
  static constexpr int kDim = 4;
  double l1 = 1.0, l2 = 1.0;

  template <class T>
  T log_prefactor(const T* eta) const {
    using std::lgamma;
    using std::log;
    const T am = eta[0] * (eta[2] + eta[3]);
    const T a1 = eta[0] * eta[3];
    return (am + a1) * log(eta[1]) + (am - 1.0) * std::log(l1) - eta[1] * l2 - lgamma(am) - lgamma(a1);
  }
  template <class T>
  T kernel(const T* eta, const T& z) const {
    using std::exp;
    using std::log;
    const T a1 = eta[0] * eta[3];
    return exp((a1 - 1.0) * log(l2 - l1 * z) - eta[1] * l1 * (1.0 - z));
  }
  double log_scale_hint(const double* eta) const {
    const double z = eta[2] / (eta[2] + eta[3]);
    return std::log(kernel<double>(eta, z));
  }
  Distribution make_q(const double* eta) const {
    return SeedDistribution::beta(eta[0] * eta[2], eta[0] * eta[3]);
  }
  std::vector<double> q_jacobian(const double* eta) const {
    return {eta[2], 0.0, eta[0], 0.0, eta[3], 0.0, 0.0, eta[0]};
  }
};

// Generic seed with NS parameters, eta = (seed, s_c, s_l):
//   f(z) = p_side(x_s - z) p_side(x_t - z),  Z ~ basis_scale(seed, s_c),
// truncated to (0, upper] with the normalizer as prefactor when upper > 0.
template <int NS>
struct GenericPairKernel {
  static constexpr int kDim = NS + 2;
  Family family;
  double xs = 0.0, xt = 0.0;
  double upper = 0.0;

  SeedDistribution seed_of(const double* eta) const {
    return SeedDistribution(family, std::span<const double>(eta, NS));
  }

  template <class T>
  T log_prefactor(const T* eta) const {
    if (upper <= 0.0) return T(0.0);
    double e[kDim];
    for (int i = 0; i < kDim; ++i) e[i] = value_of(eta[i]);
    const SeedDistribution seed = seed_of(e);
    const SeedDistribution qc = basis_scale(seed, e[NS]);
    const double F = cdf(qc, upper);
    if (!(F > 0.0)) throw DomainError("pairwise: truncation mass is zero");
    const auto gF = cdf_gradient(Distribution(qc), upper);
    const auto J = basis_scale_jacobian(seed, e[NS]);
    const int nq = qc.size();
    double g[kDim] = {};
    for (int j = 0; j <= NS; ++j) {
      double s = 0.0;
      for (int k = 0; k < nq; ++k) s += gF[k] * J[k * (NS + 1) + j];
      g[j] = s / F;
    }
    return lift<T, kDim>(std::log(F), g);
  }

  template <class T>
  T kernel(const T* eta, const T& z) const {
    using std::exp;
    const T a = xs - z;
    const T b = xt - z;
    if (is_discrete(family) || is_positive_support(family)) {
      const bool strict = !is_discrete(family);
      const bool lower_ok = family == Family::Skellam ||
                            (strict ? (value_of(a) > 0.0 && value_of(b) > 0.0) : (value_of(a) >= 0.0 && value_of(b) >= 0.0));
      if (!lower_ok) return T(0.0);
    }
    T p[kMaxSeedParams];
    basis_scale_t(family, eta, eta[NS + 1], p);
    return exp(log_density_t(family, p, a) + log_density_t(family, p, b));
  }

  double log_scale_hint(const double* eta) const {
    const SeedDistribution qc = basis_scale(seed_of(eta), eta[NS]);
    double z = mean(qc);
    if (is_discrete(family)) z = std::round(z);
    if (upper > 0.0) z = std::min(z, 0.5 * upper);
    const double k = kernel<double>(eta, z);
    return (k > 0.0 && std::isfinite(k)) ? std::log(k) : 0.0;
  }

  Distribution make_q(const double* eta) const {
    const SeedDistribution qc = basis_scale(seed_of(eta), eta[NS]);
    if (upper > 0.0) return TruncatedSeed(qc, upper);
    return qc;
  }

  std::vector<double> q_jacobian(const double* eta) const {
    const auto J = basis_scale_jacobian(seed_of(eta), eta[NS]);
    const int nq = param_count(family);
    std::vector<double> out(nq * kDim, 0.0);
    for (int k = 0; k < nq; ++k)
      for (int j = 0; j <= NS; ++j) out[k * kDim + j] = J[k * (NS + 1) + j];
    return out;
  }
};

template <class K>
std::unique_ptr<Problem> boxed(K k, const std::vector<double>& eta) {
  return std::make_unique<KernelProblem<K>>(std::move(k), eta);
}

template <int NS>
std::unique_ptr<Problem> generic_problem(Family f, double xs, double xt, double upper, const std::vector<double>& eta) {
  return boxed(GenericPairKernel<NS>{f, xs, xt, upper}, eta);
}

bool is_integer(double x) { return std::isfinite(x) && x == std::round(x); }

// Numerically stable log(sum exp(t_k)) on dual numbers.
template <class G>
G log_sum_exp(const std::vector<G>& terms) {
  double mx = kNegInf;
  for (const auto& t : terms) mx = std::max(mx, t.v);
  if (!std::isfinite(mx)) return G(kNegInf);
  G s(0.0);
  for (const auto& t : terms) s += exp(t - mx);
  return log(s) + mx;
}

template <int NS>
Dual<NS + 2> discrete_log_pair(Family fam, const std::vector<double>& eta, double xs, double xt, double tail_tol) {
  using G = Dual<NS + 2>;
  G e[NS + 2];
  for (int i = 0; i < NS + 2; ++i) e[i] = G::variable(eta[i], i);
  G qc[kMaxSeedParams], ql[kMaxSeedParams];
  basis_scale_t(fam, e, e[NS], qc);
  basis_scale_t(fam, e, e[NS + 1], ql);
  const double lo = std::min(xs, xt), hi = std::max(xs, xt);
  auto term = [&](double k) {
    return log_density_t(fam, qc, G(k)) + log_density_t(fam, ql, G(lo - k)) + log_density_t(fam, ql, G(hi - k));
  };
  std::vector<G> terms;
  if (fam != Family::Skellam) {
    const int kmax = static_cast<int>(lo);
    for (int k = 0; k <= kmax; ++k) terms.push_back(term(k));
    return log_sum_exp(terms);
  }
  // Two-sided sum: climb to the largest summand, then extend both ways until
  // the summands fall below tail_tol of the running total.
  double k = std::round(0.5 * lo);
  double tk = term(k).v;
  for (int it = 0; it < 100000; ++it) {
    const double up = term(k + 1).v, dn = term(k - 1).v;
    if (up > tk && up >= dn) {
      k += 1;
      tk = up;
    } else if (dn > tk) {
      k -= 1;
      tk = dn;
    } else {
      break;
    }
  }
  const double cut = std::log(tail_tol);
  terms.push_back(term(k));
  double total = terms.back().v;
  for (int dir : {1, -1}) {
    for (double j = k + dir;; j += dir) {
      const G t = term(j);
      terms.push_back(t);
      total = std::max(total, t.v) + std::log1p(std::exp(-std::abs(total - t.v)));
      if (t.v < total + cut) break;
      if (std::abs(j - k) > 1e6) throw ConvergenceError("Skellam pairwise sum did not converge");
    }
  }
  return log_sum_exp(terms);
}

void check_context(const PairContext& ctx) {
  if (!(ctx.h > 0.0)) throw DomainError("pairwise: lag must be positive");
  if (!std::isfinite(ctx.xs) || !std::isfinite(ctx.xt)) throw DomainError("pairwise: observations must be finite");
  if (!is_basis_family(ctx.model.seed.family()))
    throw UnsupportedError("pairwise: seed family " + family_name(ctx.model.seed.family()) +
                           " is not a Levy seed");
}

PairEstimate outside_estimate(const PairContext& ctx) {
  PairEstimate e;
  e.outside_support = true;
  e.exact = true;
  e.grad.assign(ctx.model.size(), 0.0);
  e.grad_se.assign(ctx.model.size(), 0.0);
  return e;
}

// Sample set in eta coordinates -> theta coordinates.
SampleSet to_theta(const SampleSet& s, const PairProblem& pp) {
  SampleSet t;
  t.kind = s.kind;
  t.dim = pp.theta_dim;
  t.n = s.n;
  t.u = s.u;
  t.a.assign(t.dim, std::vector<double>(s.n, 0.0));
  t.b.assign(t.dim, std::vector<double>(s.n, 0.0));
  for (int k = 0; k < pp.eta_dim; ++k)
    for (int j = 0; j < t.dim; ++j) {
      const double c = pp.eta_jacobian[k * t.dim + j];
      if (c == 0.0) continue;
      for (std::size_t i = 0; i < s.n; ++i) {
        t.a[j][i] += c * s.a[k][i];
        t.b[j][i] += c * s.b[k][i];
      }
    }
  return t;
}

PairEstimate finish_estimate(const PairContext& ctx, const PairProblem& pp, SampleSet& s, int cv_degree, bool pilot) {
  const Problem& p = *pp.problem;
  PairEstimate e;
  if (cv_degree > 0) {
    CvOptions o;
    o.degree = cv_degree;
    o.pilot = pilot;
    e.moments_unavailable = apply_control_variates(p, s, o).moments_unavailable;
  }
  const SampleSet t = to_theta(s, pp);
  LogRatioEstimate lr;
  try {
    lr = log_ratio(t);
  } catch (const EstimationError&) {
    throw EstimationError("pairwise density estimate is not positive at (" + std::to_string(ctx.xs) + ", " +
                          std::to_string(ctx.xt) + "); increase the sample size or lower the control variate degree");
  }
  const double sc = p.log_scale();
  e.n = t.n;
  e.log_density = lr.log_value + sc;
  e.log_se = lr.log_se;
  e.log_bias = lr.log_bias;
  e.density = std::exp(e.log_density);
  e.density_se = lr.value_se * std::exp(sc);
  e.grad = lr.ratio;
  e.grad_se = lr.ratio_se;
  return e;
}

}  // namespace

bool in_support(const SeedDistribution& seed, double x) {
  if (!std::isfinite(x)) return false;
  const Family f = seed.family();
  if (is_discrete(f)) {
    if (!is_integer(x)) throw DomainError("pairwise: discrete seed needs integer observations");
    return f == Family::Skellam || x >= 0.0;
  }
  if (is_positive_support(f)) return x > 0.0;
  return true;
}

Distribution pair_mixing_law(const ModelSpec& model, double h) {
  const SliceTriple sl = pair_slices(model.trawl, h);
  if (!(sl.common > 0.0)) throw DomainError("pairwise: common slice area is zero");
  const SeedDistribution& seed = model.seed;
  if (seed.family() == Family::Gamma) return SeedDistribution::beta(seed[0] * sl.common, seed[0] * sl.left);
  return basis_scale(seed, sl.common);
}

bool pair_mixing_law_shared(const ModelSpec& model) { return model.seed.family() != Family::InvGaussian; }

PairProblem make_pair_problem(const PairContext& ctx) {
  check_context(ctx);
  const ModelSpec& m = ctx.model;
  const SeedDistribution& seed = m.seed;
  const int ns = seed.size();
  const int nt = m.trawl.size();
  const SliceTriple sl = ctx.slices();
  if (!(sl.common > 0.0)) throw DomainError("pairwise: common slice area is zero");
  PairProblem pp;
  pp.eta_dim = ns + 2;
  pp.theta_dim = ns + nt;
  std::vector<double> eta = seed.param_vector();
  eta.push_back(sl.common);
  eta.push_back(sl.left);
  pp.eta_jacobian.assign(pp.eta_dim * pp.theta_dim, 0.0);
  for (int i = 0; i < ns; ++i) pp.eta_jacobian[i * pp.theta_dim + i] = 1.0;
  const SliceGradient sg = pair_slices_gradient(m.trawl, ctx.h);
  for (int j = 0; j < nt; ++j) {
    pp.eta_jacobian[ns * pp.theta_dim + ns + j] = sg.common[j];
    pp.eta_jacobian[(ns + 1) * pp.theta_dim + ns + j] = sg.left[j];
  }
  const Family f = seed.family();
  const double l1 = std::min(ctx.xs, ctx.xt), l2 = std::max(ctx.xs, ctx.xt);
  switch (f) {
    case Family::Gamma:
      pp.problem = boxed(GammaPairKernel{l1, l2}, eta);
      break;
    case Family::InvGaussian:
      pp.problem = generic_problem<2>(f, ctx.xs, ctx.xt, l1, eta);
      break;
    case Family::Poisson:
      pp.problem = generic_problem<1>(f, ctx.xs, ctx.xt, 0.0, eta);
      break;
    case Family::NegBinomial:
    case Family::Skellam:
    case Family::Gaussian:
      pp.problem = generic_problem<2>(f, ctx.xs, ctx.xt, 0.0, eta);
      break;
    case Family::NIG:
      pp.problem = generic_problem<4>(f, ctx.xs, ctx.xt, 0.0, eta);
      break;
    default:
      throw UnsupportedError("pairwise: unsupported seed " + family_name(f));
  }
  return pp;
}

const char* pair_method_name(PairMethod m) {
  switch (m) {
    case PairMethod::Auto: return "auto";
    case PairMethod::PG: return "pg";
    case PairMethod::SF: return "sf";
    case PairMethod::MVG: return "mvg";
    case PairMethod::Hybrid: return "hybrid";
    case PairMethod::Exact: return "exact";
  }
  return "?";
}

PairMethod pair_method_from_name(const std::string& name) {
  for (PairMethod m : {PairMethod::Auto, PairMethod::PG, PairMethod::SF, PairMethod::MVG, PairMethod::Hybrid,
                       PairMethod::Exact})
    if (name == pair_method_name(m)) return m;
  throw DomainError("unknown pairwise method: " + name);
}

PairMethod resolve_method(PairMethod m, const SeedDistribution& seed) {
  const bool disc = seed.discrete();
  if (m == PairMethod::Auto) return disc ? PairMethod::Exact : PairMethod::PG;
  if (m == PairMethod::Exact && !disc) throw UnsupportedError("exact pairwise sums need a discrete seed");
  if (m == PairMethod::PG && disc) throw UnsupportedError("pathwise gradients need a continuous seed; use mvg or hybrid");
  if (m == PairMethod::MVG && seed.family() != Family::Poisson && seed.family() != Family::Skellam &&
      seed.family() != Family::Gaussian)
    throw UnsupportedError("measure-valued gradients are available for Poisson, Skellam and Gaussian seeds");
  if (m == PairMethod::Hybrid && seed.family() != Family::NegBinomial)
    throw UnsupportedError("the hybrid estimator is available for negative binomial seeds");
  return m;
}

PairEstimate pairwise_density_mc(const PairContext& ctx, std::size_t n, Rng& rng, int cv_degree) {
  check_context(ctx);
  const SeedDistribution& seed = ctx.model.seed;
  if (!in_support(seed, ctx.xs) || !in_support(seed, ctx.xt)) return outside_estimate(ctx);
  if (cv_degree > 0 && seed.discrete()) throw UnsupportedError("control variates need a continuous seed");
  PairProblem pp = make_pair_problem(ctx);
  SampleSet s = value_samples(*pp.problem, draw_base(n, rng));
  PairEstimate e;
  if (cv_degree > 0) {
    CvOptions o;
    o.degree = cv_degree;
    e.moments_unavailable = apply_control_variates(*pp.problem, s, o).moments_unavailable;
  }
  const ValueEstimate v = summarize_value(s);
  const double sc = pp.problem->log_scale();
  e.n = s.n;
  e.density = v.value * std::exp(sc);
  e.density_se = v.std_error * std::exp(sc);
  if (v.value > 0.0) {
    e.log_density = std::log(v.value) + sc;
    e.log_se = v.std_error / v.value;
  }
  return e;
}

PairEstimate pairwise_logdensity_discrete(const PairContext& ctx, double tail_tol) {
  check_context(ctx);
  if (!(tail_tol > 0.0 && tail_tol < 1.0)) throw DomainError("pairwise: tail tolerance must be in (0, 1)");
  const SeedDistribution& seed = ctx.model.seed;
  if (!seed.discrete()) throw UnsupportedError("exact pairwise sums need a discrete seed");
  if (!in_support(seed, ctx.xs) || !in_support(seed, ctx.xt)) return outside_estimate(ctx);
  const SliceTriple sl = ctx.slices();
  std::vector<double> eta = seed.param_vector();
  eta.push_back(sl.common);
  eta.push_back(sl.left);
  std::vector<double> ge;
  double lv = 0.0;
  switch (seed.family()) {
    case Family::Poisson: {
      const auto r = discrete_log_pair<1>(seed.family(), eta, ctx.xs, ctx.xt, tail_tol);
      lv = r.v;
      ge.assign(r.d.begin(), r.d.end());
      break;
    }
    default: {
      const auto r = discrete_log_pair<2>(seed.family(), eta, ctx.xs, ctx.xt, tail_tol);
      lv = r.v;
      ge.assign(r.d.begin(), r.d.end());
      break;
    }
  }
  const int ns = seed.size(), nt = ctx.model.trawl.size();
  const SliceGradient sg = pair_slices_gradient(ctx.model.trawl, ctx.h);
  PairEstimate e;
  e.exact = true;
  e.log_density = lv;
  e.density = std::exp(lv);
  e.grad.assign(ns + nt, 0.0);
  e.grad_se.assign(ns + nt, 0.0);
  for (int i = 0; i < ns; ++i) e.grad[i] = ge[i];
  for (int j = 0; j < nt; ++j) e.grad[ns + j] = ge[ns] * sg.common[j] + ge[ns + 1] * sg.left[j];
  return e;
}

// Poisson and negative binomial pmf of the slice laws in extended precision.
static long double slice_log_pmf(const SeedDistribution& q, long double k) {
  if (q.family() == Family::Poisson) {
    const long double lam = q[0];
    return (k == 0 ? 0.0L : k * std::log(lam)) - lam - std::lgamma(k + 1.0L);
  }
  const long double m = q[0], p = q[1];
  return std::lgamma(k + m) - std::lgamma(m) - std::lgamma(k + 1.0L) + m * std::log1p(-p) +
         (k == 0 ? 0.0L : k * std::log(p));
}

double pairwise_density_discrete(const PairContext& ctx, double tail_tol) {
  const SeedDistribution& seed = ctx.model.seed;
  const Family fam = seed.family();
  if (fam != Family::Poisson && fam != Family::NegBinomial) return pairwise_logdensity_discrete(ctx, tail_tol).density;
  check_context(ctx);
  if (!in_support(seed, ctx.xs) || !in_support(seed, ctx.xt)) return 0.0;
  const SliceTriple sl = ctx.slices();
  const SeedDistribution qc = basis_scale(seed, sl.common), ql = basis_scale(seed, sl.left);
  const long double lo = std::min(ctx.xs, ctx.xt), hi = std::max(ctx.xs, ctx.xt);
  long double s = 0.0L;
  for (long double k = 0; k <= lo; k += 1)
    s += std::exp(slice_log_pmf(qc, k) + slice_log_pmf(ql, lo - k) + slice_log_pmf(ql, hi - k));
  return static_cast<double>(s);
}

double pairwise_density_quadrature(const PairContext& ctx, double rel_tol) {
  check_context(ctx);
  const SeedDistribution& seed = ctx.model.seed;
  if (seed.discrete()) return pairwise_density_discrete(ctx);
  if (!in_support(seed, ctx.xs) || !in_support(seed, ctx.xt)) return 0.0;
  const SliceTriple sl = ctx.slices();
  const SeedDistribution qc = basis_scale(seed, sl.common);
  const SeedDistribution ql = basis_scale(seed, sl.left);
  const double xs = ctx.xs, xt = ctx.xt;
  auto g = [&](double z) {
    const double v = log_density(qc, z) + log_density(ql, xs - z) + log_density(ql, xt - z);
    return std::isfinite(v) ? std::exp(v) : 0.0;
  };
  QuadOptions o;
  o.rel_tol = rel_tol;
  o.max_subdivisions = 20000;
  std::vector<QuadResult> parts;
  const double l1 = std::min(xs, xt);
  switch (seed.family()) {
    case Family::Gamma: {
      const double a0 = seed[0] * sl.common, a1 = seed[0] * sl.left;
      const double ab = xs == xt ? 2.0 * a1 - 1.0 : a1;
      if (!(ab > 0.0)) throw DomainError("pairwise density is infinite at tied observations with this shape");
      if (a0 >= 1.0) {
        parts.push_back(integrate_singular(g, 0.0, l1, a0, ab, o));
        break;
      }
      // Near zero integrate in u = F_c(z), where the common slice law
      // may put almost all of its mass far below any power substitution.
      const double mid = 0.5 * l1;
      auto kern = [&](double u) {
        const double z = quantile(qc, u);
        const double v = log_density(ql, xs - z) + log_density(ql, xt - z);
        return std::isfinite(v) ? std::exp(v) : 0.0;
      };
      parts.push_back(integrate(kern, 0.0, cdf(qc, mid), o));
      parts.push_back(integrate_singular(g, mid, l1, 1.0, ab, o));
      break;
    }
    case Family::InvGaussian:
      parts.push_back(integrate(g, 0.0, l1, o));
      break;
    default: {
      std::vector<double> pts = {mean(qc), xs - mean(ql), xt - mean(ql)};
      std::sort(pts.begin(), pts.end());
      parts.push_back(integrate(g, -INFINITY, pts[0], o));
      for (int i = 0; i + 1 < 3; ++i)
        if (pts[i + 1] > pts[i]) parts.push_back(integrate(g, pts[i], pts[i + 1], o));
      parts.push_back(integrate(g, pts[2], INFINITY, o));
    }
  }
  double v = 0.0;
  for (const auto& r : parts) {
    if (!r.converged)
      throw ConvergenceError("pairwise quadrature did not converge (error estimate " + std::to_string(r.error) +
                             " after " + std::to_string(r.evaluations) + " evaluations)");
    v += r.value;
  }
  return v;
}

PairEstimate pairwise_logdensity_and_grad(const PairContext& ctx, const PairOptions& opts, const BaseSamples& base,
                                          const Draws* shared) {
  check_context(ctx);
  const SeedDistribution& seed = ctx.model.seed;
  if (!in_support(seed, ctx.xs) || !in_support(seed, ctx.xt)) return outside_estimate(ctx);
  const PairMethod method = resolve_method(opts.method, seed);
  if (method == PairMethod::Exact) return pairwise_logdensity_discrete(ctx);
  if (opts.cv_degree > 0 && seed.discrete()) throw UnsupportedError("control variates need a continuous seed");
  PairProblem pp = make_pair_problem(ctx);
  const Problem& p = *pp.problem;
  SampleSet s;
  switch (method) {
    case PairMethod::PG:
    case PairMethod::SF: {
      const Estimator kind = method == PairMethod::PG ? Estimator::PG : Estimator::SF;
      if (shared && shared->kind == kind && pair_mixing_law_shared(ctx.model))
        s = samples_from_draws(p, *shared);
      else
        s = samples_from_draws(p, make_draws(kind, p.q(), base));
      break;
    }
    case PairMethod::MVG:
      s = mvg_samples(p, base, true);
      break;
    case PairMethod::Hybrid:
      s = hybrid_samples(p, base);
      break;
    default:
      throw ConsistencyError("unexpected pairwise method");
  }
  return finish_estimate(ctx, pp, s, opts.cv_degree, opts.pilot);
}

PairEstimate pairwise_logdensity_and_grad(const PairContext& ctx, const PairOptions& opts, Rng& rng) {
  std::size_t n = opts.n;
  for (int round = 0;; ++round) {
    const PairEstimate e = pairwise_logdensity_and_grad(ctx, opts, draw_base(n, rng), nullptr);
    const double rel = e.log_se * e.log_se;
    if (!opts.adaptive || e.exact || rel <= opts.target_rel_var || n >= opts.max_n || round >= 3) return e;
    n = std::min<std::size_t>(opts.max_n, static_cast<std::size_t>(std::ceil(1.2 * double(n) * rel / opts.target_rel_var)));
  }
}

std::vector<PairEstimate> pairwise_degree_sweep(const PairContext& ctx, const Draws& draws,
                                                std::span<const int> degrees, bool pilot) {
  check_context(ctx);
  if (ctx.model.seed.discrete()) throw UnsupportedError("degree sweep needs a continuous seed");
  std::vector<PairEstimate> out;
  if (!in_support(ctx.model.seed, ctx.xs) || !in_support(ctx.model.seed, ctx.xt)) {
    out.assign(degrees.size(), outside_estimate(ctx));
    return out;
  }
  PairProblem pp = make_pair_problem(ctx);
  const SampleSet s0 = samples_from_draws(*pp.problem, draws);
  for (int m : degrees) {
    SampleSet s = s0;
    out.push_back(finish_estimate(ctx, pp, s, m, pilot));
  }
  return out;
}

SampleSet pair_samples_theta(const PairContext& ctx, const Draws& draws, int cv_degree, CvReport* report) {
  check_context(ctx);
  if (!in_support(ctx.model.seed, ctx.xs) || !in_support(ctx.model.seed, ctx.xt))
    throw DomainError("pair samples: observation outside the support");
  PairProblem pp = make_pair_problem(ctx);
  SampleSet s = samples_from_draws(*pp.problem, draws);
  if (cv_degree > 0) {
    CvOptions o;
    o.degree = cv_degree;
    const CvReport r = apply_control_variates(*pp.problem, s, o);
    if (report) *report = r;
  }
  return to_theta(s, pp);
}

}  // namespace trawl
