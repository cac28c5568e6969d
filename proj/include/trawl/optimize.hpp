#pragma once

#include <functional>
#include <string>
#include <vector>

#include "trawl/error.hpp"

namespace trawl {

// Returns f(x) and writes its gradient. A non-finite value marks x as infeasible.
using Objective = std::function<double(const std::vector<double>& x, std::vector<double>& grad)>;

enum class OptimizerKind { QuasiNewton, GradientDescent };
const char* optimizer_name(OptimizerKind k);
OptimizerKind optimizer_from_name(const std::string& name);

struct OptimizeOptions {
  OptimizerKind kind = OptimizerKind::QuasiNewton;
  int max_iter = 100;
  double grad_tol = 1e-5;  // on the infinity norm of the gradient
  int max_backtracks = 30;
  double armijo = 1e-4;
  double max_step = 2.0;  // cap on the step length in x
};

struct OptimizeResult {
  std::vector<double> x;  // best iterate
  double value = 0.0;
  std::vector<double> grad;
  std::vector<double> value_trace;
  std::vector<double> grad_norm_trace;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  bool fallback_used = false;
  std::string message;
};

// The objective became -inf or NaN at every trial point; last_x is the last valid iterate.
class DivergenceError : public ConvergenceError {
 public:
  DivergenceError(const std::string& what, std::vector<double> last_x)
      : ConvergenceError(what), last_x(std::move(last_x)) {}
  std::vector<double> last_x;
};

// Minimizes f from x0. Quasi-Newton uses BFGS with a backtracking Armijo line
// search; after two failed line searches it switches to gradient steps of
// length 1/sqrt(iteration).
OptimizeResult minimize(const Objective& f, std::vector<double> x0, const OptimizeOptions& opts = {});

}  // namespace trawl
