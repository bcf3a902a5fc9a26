#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "tvopt/core.hpp"

namespace tvopt::solvers {

/// Online inexact proximal gradient state: x <- prox(g, X, alpha, x - alpha v),
/// applied steps_per_slice times against each incoming slice.
struct ProxGradState {
  Vector x;
  double alpha = 0.1;
  int steps_per_slice = 1;
};

TraceRecord prox_grad_step(ProxGradState& state, const ProblemSlice& slice,
                           const GradientNoiseModel& noise, Rng& rng);

enum class DualRule {
  GradientAscent,  // lambda <- proj+((1 - alpha r) lambda + alpha v_c)
  AsPrinted,       // lambda <- proj+((1 - r) lambda + alpha v_c)
};

/// Online regularized primal-dual state z = (x, lambda), lambda >= 0.
struct PrimalDualState {
  Vector x;
  Vector lambda;
  double alpha = 0.1;
  double r = 0.1;
  DualRule dual_rule = DualRule::GradientAscent;
};

/// One primal-dual round. Noise is drawn once over the stacked (n + m)
/// gradient so a bounded model bounds the combined primal/dual error.
TraceRecord primal_dual_step(PrimalDualState& state, const ProblemSlice& slice,
                             const GradientNoiseModel& noise, Rng& rng);

enum class StaticMethod {
  GradientDescent,
  NesterovV1,   // momentum (k-1)/(k+2), no strong-convexity knowledge
  NesterovV2,   // constant momentum (sqrt(L)-sqrt(mu))/(sqrt(L)+sqrt(mu))
  HeavyBall,
  NonlinearCg,  // exact line search; quadratic smooth part only
};

StaticMethod static_method_from_name(const std::string& name);
std::string static_method_name(StaticMethod m);

struct StaticMethodConfig {
  StaticMethod method = StaticMethod::GradientDescent;
  double alpha = 0.1;
  double beta = 0.9;              // heavy-ball momentum
  bool restart_on_slice = false;  // reset momentum state when slice t changes
};

/// Momentum/direction state carried across steps (and across slices unless
/// restart_on_slice is set).
struct StaticMethodState {
  Vector x;
  Vector x_prev;
  Vector nesterov_y;
  Vector cg_dir;
  Vector cg_grad_prev;
  long k = 0;
  long last_slice_t = -1;

  static StaticMethodState init(Vector x0);
};

void static_method_step(const StaticMethodConfig& cfg, const ProblemSlice& slice,
                        StaticMethodState& state);

struct BatchOracleResult {
  Vector x_star;
  double f_star = 0.0;
  double certificate = 0.0;  // prox-gradient fixed-point residual at x_star
  long iterations = 0;
};

/// Batch solve did not reach the requested tolerance; carries the best iterate.
struct ConvergenceFailure : std::runtime_error {
  explicit ConvergenceFailure(BatchOracleResult best_result)
      : std::runtime_error("batch solve: iteration cap exceeded"),
        best(std::move(best_result)) {}
  BatchOracleResult best;
};

/// High-accuracy minimizer of one slice. Unconstrained smooth quadratics are
/// solved directly; everything else runs accelerated proximal gradient with
/// exact gradients until ||x - prox(x - alpha grad)|| / alpha <= tol.
BatchOracleResult batch_solve(const ProblemSlice& slice, double tol = 1e-10,
                              long max_iterations = 1000000);

/// Saddle point of the r-regularized Lagrangian of a constrained slice,
/// computed by running the exact primal-dual iteration to a fixed point.
std::pair<Vector, Vector> batch_saddle_solve(const ProblemSlice& slice, double r,
                                             double alpha, double tol = 1e-12,
                                             long max_iterations = 10000000);

/// Contraction factor of the proximal gradient step on a (mu, L) slice.
inline double contraction_factor(double alpha, double mu, double lip) {
  return std::max(std::abs(1.0 - alpha * mu), std::abs(1.0 - alpha * lip));
}

}  // namespace tvopt::solvers
