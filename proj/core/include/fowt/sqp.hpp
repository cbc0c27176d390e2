#pragma once

#include <functional>
#include <string>
#include <vector>

namespace fowt::opt {

struct Evaluation {
  double objective = 0.0;
  std::vector<double> constraints;  ///< g(x) <= 0
};

using EvalFn = std::function<Evaluation(const std::vector<double>&)>;
using ScalarFn = std::function<double(const std::vector<double>&)>;

/// Central differences with an absolute step on variables normalized by
/// their bounds; the gradient is returned in physical units. Without bounds
/// the scale is 1.
std::vector<double> fd_gradient(const ScalarFn& fn, const std::vector<double>& x, double step,
                                const std::vector<double>& lower = {},
                                const std::vector<double>& upper = {});

struct Jacobians {
  std::vector<double> objective;                 ///< df/dx
  std::vector<std::vector<double>> constraints;  ///< dg_i/dx, row per constraint
};

/// Objective and constraint gradients from one set of 2n probes, evaluated on
/// up to `jobs` threads.
Jacobians fd_jacobians(const EvalFn& fn, const std::vector<double>& x, double step,
                       const std::vector<double>& lower, const std::vector<double>& upper, int jobs = 1);

struct SqpSettings {
  double fd_step = 1e-4;
  double tol = 1e-3;
  int max_iter = 100;
  int jobs = 1;
  double elastic_penalty = 1e3;  ///< cost of relaxing the linearized constraints
};

enum class SqpStatus { converged, max_iterations, infeasible };
const char* to_string(SqpStatus status);

struct SqpIterate {
  int iter = 0;
  std::vector<double> x;
  Evaluation eval;
  double kkt_residual = 0.0;
  double step_length = 0.0;
};

struct SqpResult {
  std::vector<double> x;
  Evaluation eval;
  std::vector<double> multipliers;
  SqpStatus status = SqpStatus::max_iterations;
  int iterations = 0;
  double kkt_residual = 0.0;
  std::vector<std::size_t> violated;  ///< constraints above tol at the end
  std::vector<SqpIterate> history;    ///< x0 first, then every accepted step
};

/// Sequential quadratic programming with bounds, damped BFGS, an elastic
/// active-set QP subproblem and an l1 merit line search.
SqpResult minimize(const EvalFn& fn, const std::vector<double>& x0, const std::vector<double>& lower,
                   const std::vector<double>& upper, const SqpSettings& settings = {},
                   const std::function<void(const SqpIterate&)>& on_iterate = {});

struct QpResult {
  std::vector<double> p;
  double xi = 0.0;
  std::vector<double> multipliers;  ///< of the linearized general constraints
  int iterations = 0;
};

/// min 1/2 p'Bp + c'p + M xi + 1/2 eps xi^2 subject to
/// g + J p - xi max(g, 0) <= 0, lo <= p <= hi, 0 <= xi <= 1. B must be positive definite.
QpResult solve_elastic_qp(const std::vector<std::vector<double>>& b, const std::vector<double>& c,
                          const std::vector<std::vector<double>>& jac, const std::vector<double>& g,
                          const std::vector<double>& lo, const std::vector<double>& hi,
                          double penalty);

}  // namespace fowt::opt
