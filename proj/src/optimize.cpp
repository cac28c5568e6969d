#include "trawl/optimize.hpp"

#include <algorithm>
#include <cmath>

namespace trawl {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double inf_norm(const std::vector<double>& g) {
  double m = 0.0;
  for (double v : g) m = std::max(m, std::abs(v));
  return m;
}

bool finite_all(const std::vector<double>& g) {
  return std::all_of(g.begin(), g.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

const char* optimizer_name(OptimizerKind k) {
  return k == OptimizerKind::QuasiNewton ? "quasi-newton" : "gradient-descent";
}

OptimizerKind optimizer_from_name(const std::string& name) {
  if (name == "quasi-newton" || name == "bfgs") return OptimizerKind::QuasiNewton;
  if (name == "gradient-descent" || name == "gradient-ascent" || name == "gradient") return OptimizerKind::GradientDescent;
  throw DomainError("unknown optimizer: " + name);
}

OptimizeResult minimize(const Objective& f, std::vector<double> x0, const OptimizeOptions& opts) {
  const std::size_t d = x0.size();
  OptimizeResult r;
  std::vector<double> g(d), gn(d), xn(d), p(d), s(d), y(d);
  double fx = f(x0, g);
  r.evaluations = 1;
  if (!std::isfinite(fx) || !finite_all(g)) throw DivergenceError("objective is not finite at the starting point", x0);
  std::vector<double> x = x0;
  r.x = x;
  r.value = fx;
  r.grad = g;
  r.value_trace.push_back(fx);
  r.grad_norm_trace.push_back(inf_norm(g));

  // Inverse Hessian approximation, row-major.
  std::vector<double> H(d * d, 0.0);
  auto reset_h = [&] {
    std::fill(H.begin(), H.end(), 0.0);
    for (std::size_t i = 0; i < d; ++i) H[i * d + i] = 1.0;
  };
  reset_h();
  bool descent_mode = opts.kind == OptimizerKind::GradientDescent;
  int failed_searches = 0;

  for (int it = 1; it <= opts.max_iter; ++it) {
    r.iterations = it;
    const double gnorm = inf_norm(g);
    if (gnorm < opts.grad_tol) {
      r.converged = true;
      r.message = "gradient norm below tolerance";
      break;
    }
    double t0 = 1.0;
    if (descent_mode) {
      const double l2 = std::sqrt(dot(g, g));
      for (std::size_t i = 0; i < d; ++i) p[i] = -g[i] / l2;
      t0 = 1.0 / std::sqrt(double(it));
    } else {
      for (std::size_t i = 0; i < d; ++i) {
        double v = 0.0;
        for (std::size_t j = 0; j < d; ++j) v -= H[i * d + j] * g[j];
        p[i] = v;
      }
      if (dot(p, g) >= 0.0) {
        reset_h();
        for (std::size_t i = 0; i < d; ++i) p[i] = -g[i];
      }
      const double len = std::sqrt(dot(p, p));
      if (len > opts.max_step) t0 = opts.max_step / len;
    }
    const double slope = dot(p, g);
    double t = t0;
    bool accepted = false;
    double fn = 0.0;
    for (int b = 0; b < opts.max_backtracks; ++b) {
      for (std::size_t i = 0; i < d; ++i) xn[i] = x[i] + t * p[i];
      fn = f(xn, gn);
      ++r.evaluations;
      if (std::isfinite(fn) && finite_all(gn) && fn <= fx + opts.armijo * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      ++failed_searches;
      reset_h();
      if (failed_searches >= 2 && !descent_mode) {
        descent_mode = true;
        r.fallback_used = true;
        continue;
      }
      if (descent_mode && failed_searches >= 4) {
        r.message = "line search failed";
        break;
      }
      continue;
    }
    for (std::size_t i = 0; i < d; ++i) {
      s[i] = xn[i] - x[i];
      y[i] = gn[i] - g[i];
    }
    const double sy = dot(s, y);
    if (!descent_mode && sy > 1e-12 * std::sqrt(dot(s, s) * dot(y, y))) {
      if (it == 1) {
        const double scale = sy / dot(y, y);
        for (std::size_t i = 0; i < d; ++i) H[i * d + i] = scale;
      }
      // H <- (I - rho s y') H (I - rho y s') + rho s s'
      const double rho = 1.0 / sy;
      std::vector<double> Hy(d, 0.0);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) Hy[i] += H[i * d + j] * y[j];
      const double yHy = dot(y, Hy);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          H[i * d + j] += rho * ((1.0 + rho * yHy) * s[i] * s[j] - Hy[i] * s[j] - s[i] * Hy[j]);
    }
    x = xn;
    g = gn;
    fx = fn;
    r.value_trace.push_back(fx);
    r.grad_norm_trace.push_back(inf_norm(g));
    if (fx < r.value) {
      r.value = fx;
      r.x = x;
      r.grad = g;
    }
  }
  if (r.message.empty()) r.message = r.converged ? "gradient norm below tolerance" : "iteration limit reached";
  return r;
}

}  // namespace trawl
