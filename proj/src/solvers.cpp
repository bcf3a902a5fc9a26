#include "tvopt/solvers.hpp"

#include <chrono>
#include <cmath>

namespace tvopt::solvers {

namespace {

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

TraceRecord prox_grad_step(ProxGradState& state, const ProblemSlice& slice,
                           const GradientNoiseModel& noise, Rng& rng) {
  if (state.alpha <= 0.0) throw ConfigError("prox_grad_step: alpha must be > 0");
  if (state.steps_per_slice < 1)
    throw ConfigError("prox_grad_step: steps_per_slice must be >= 1");
  const auto start = std::chrono::steady_clock::now();

  TraceRecord rec;
  rec.t = slice.t;
  for (int k = 0; k < state.steps_per_slice; ++k) {
    auto [v, e] = inexact_gradient(slice, state.x, noise, rng);
    if (k == 0) {
      rec.v = v;
      rec.e_true = e;
    }
    state.x = prox(slice.reg, slice.set, state.alpha,
                   state.x - state.alpha * v);
  }
  rec.x = state.x;
  rec.f_value = slice.objective(state.x);
  rec.wall_seconds = elapsed_seconds(start);
  return rec;
}

TraceRecord primal_dual_step(PrimalDualState& state, const ProblemSlice& slice,
                             const GradientNoiseModel& noise, Rng& rng) {
  if (!slice.constraints)
    throw ConfigError("primal_dual_step: slice has no constraint map");
  const ConstraintMap& con = *slice.constraints;
  if (state.lambda.size() != con.count)
    throw DimensionError("primal_dual_step: lambda dimension != constraint count");
  if (state.r < 0.0) throw ConfigError("primal_dual_step: r must be >= 0");
  const auto start = std::chrono::steady_clock::now();

  const int n = slice.dim;
  const int m = con.count;

  // One stacked error draw covers both the primal and dual gradient proxies.
  Vector err = Vector::Zero(n + m);
  if (noise.kind != GradientNoiseModel::Kind::None)
    err = noise_error(noise, n + m, rng);

  Vector grad_h = slice.smooth.grad(state.x);
  Vector v_primal = grad_h - err.head(n) +
                    con.jacobian(state.x).transpose() * state.lambda;
  Vector v_dual = con.eval(state.x) - err.tail(m);

  Vector x_next =
      prox(slice.reg, slice.set, state.alpha, state.x - state.alpha * v_primal);

  double keep = state.dual_rule == DualRule::GradientAscent
                    ? 1.0 - state.alpha * state.r
                    : 1.0 - state.r;
  Vector lambda_next =
      (keep * state.lambda + state.alpha * v_dual).cwiseMax(0.0);

  state.x = std::move(x_next);
  state.lambda = std::move(lambda_next);

  TraceRecord rec;
  rec.t = slice.t;
  rec.x = state.x;
  rec.lambda = state.lambda;
  rec.f_value = slice.objective(state.x);
  rec.v = v_primal;
  rec.e_true = err.norm();
  rec.wall_seconds = elapsed_seconds(start);
  return rec;
}

StaticMethod static_method_from_name(const std::string& name) {
  if (name == "gradient_descent") return StaticMethod::GradientDescent;
  if (name == "nesterov_v1") return StaticMethod::NesterovV1;
  if (name == "nesterov_v2") return StaticMethod::NesterovV2;
  if (name == "heavy_ball") return StaticMethod::HeavyBall;
  if (name == "nonlinear_cg") return StaticMethod::NonlinearCg;
  throw ConfigError("unknown method: " + name);
}

std::string static_method_name(StaticMethod m) {
  switch (m) {
    case StaticMethod::GradientDescent: return "gradient_descent";
    case StaticMethod::NesterovV1: return "nesterov_v1";
    case StaticMethod::NesterovV2: return "nesterov_v2";
    case StaticMethod::HeavyBall: return "heavy_ball";
    case StaticMethod::NonlinearCg: return "nonlinear_cg";
  }
  return "?";
}

StaticMethodState StaticMethodState::init(Vector x0) {
  StaticMethodState s;
  s.x = x0;
  s.x_prev = x0;
  s.nesterov_y = std::move(x0);
  return s;
}

void static_method_step(const StaticMethodConfig& cfg, const ProblemSlice& slice,
                        StaticMethodState& state) {
  if (cfg.alpha <= 0.0) throw ConfigError("static_method_step: alpha must be > 0");
  if (cfg.restart_on_slice && state.last_slice_t != slice.t) {
    state.x_prev = state.x;
    state.nesterov_y = state.x;
    state.cg_dir.resize(0);
    state.cg_grad_prev.resize(0);
    state.k = 0;
  }
  state.last_slice_t = slice.t;
  state.k += 1;

  switch (cfg.method) {
    case StaticMethod::GradientDescent: {
      state.x_prev = state.x;
      state.x = prox(slice.reg, slice.set, cfg.alpha,
                     state.x - cfg.alpha * slice.smooth.grad(state.x));
      break;
    }
    case StaticMethod::HeavyBall: {
      Vector step = state.x - cfg.alpha * slice.smooth.grad(state.x) +
                    cfg.beta * (state.x - state.x_prev);
      state.x_prev = state.x;
      state.x = prox(slice.reg, slice.set, cfg.alpha, step);
      break;
    }
    case StaticMethod::NesterovV1:
    case StaticMethod::NesterovV2: {
      double beta;
      if (cfg.method == StaticMethod::NesterovV1) {
        beta = static_cast<double>(state.k - 1) / static_cast<double>(state.k + 2);
      } else {
        double sl = std::sqrt(slice.smooth.lip);
        double sm = std::sqrt(slice.smooth.mu);
        beta = (sl - sm) / (sl + sm);
      }
      Vector x_new =
          prox(slice.reg, slice.set, cfg.alpha,
               state.nesterov_y - cfg.alpha * slice.smooth.grad(state.nesterov_y));
      state.nesterov_y = x_new + beta * (x_new - state.x);
      state.x_prev = state.x;
      state.x = std::move(x_new);
      break;
    }
    case StaticMethod::NonlinearCg: {
      if (!slice.smooth.is_quadratic)
        throw ConfigError("nonlinear_cg: exact line search needs a quadratic cost");
      if (slice.reg.kind != RegularizerSpec::Kind::Zero ||
          slice.set.kind != FeasibleSet::Kind::AllSpace)
        throw ConfigError("nonlinear_cg: unconstrained smooth problems only");
      Vector g = slice.smooth.grad(state.x);
      Vector d;
      if (state.cg_dir.size() == 0) {
        d = -g;
      } else {
        double denom = state.cg_grad_prev.squaredNorm();
        double beta =
            denom > 0.0
                ? std::max(0.0, g.dot(g - state.cg_grad_prev) / denom)
                : 0.0;
        d = -g + beta * state.cg_dir;
      }
      // Exact line search on a quadratic: curvature along d from one extra
      // gradient evaluation, since grad is affine.
      Vector qd = slice.smooth.grad(state.x + d) - g;
      double curv = d.dot(qd);
      state.x_prev = state.x;
      if (curv > 0.0) {
        double step = -g.dot(d) / curv;
        state.x += step * d;
      }
      state.cg_dir = std::move(d);
      state.cg_grad_prev = std::move(g);
      break;
    }
  }
}

namespace {

// Recovers the constant Hessian of a quadratic smooth part by probing
// gradient differences along coordinate directions.
Matrix probe_hessian(const SmoothPart& smooth, int dim) {
  Vector g0 = smooth.grad(Vector::Zero(dim));
  Matrix q(dim, dim);
  for (int i = 0; i < dim; ++i) {
    Vector e = Vector::Zero(dim);
    e[i] = 1.0;
    q.col(i) = smooth.grad(e) - g0;
  }
  return q;
}

}  // namespace

BatchOracleResult batch_solve(const ProblemSlice& slice, double tol,
                              long max_iterations) {
  if (tol <= 0.0) throw ConfigError("batch_solve: tol must be > 0");
  const int n = slice.dim;
  const double alpha = 1.0 / slice.smooth.lip;

  auto residual_at = [&](const Vector& x) {
    Vector p = prox(slice.reg, slice.set, alpha, x - alpha * slice.smooth.grad(x));
    return std::make_pair((x - p).norm() / alpha, p);
  };

  if (slice.smooth.is_quadratic && slice.reg.kind == RegularizerSpec::Kind::Zero &&
      slice.set.kind == FeasibleSet::Kind::AllSpace && n <= 512) {
    Matrix q = slice.smooth.hessian ? slice.smooth.hessian()
                                    : probe_hessian(slice.smooth, n);
    Vector c = slice.smooth.grad(Vector::Zero(n));
    Eigen::LDLT<Matrix> ldlt(q);
    Vector x = ldlt.solve(-c);
    double res = slice.smooth.grad(x).norm();
    // Iterative refinement drives the residual (backward error) to machine
    // level even when q is badly conditioned.
    for (int pass = 0; pass < 3 && std::isfinite(res) && res > tol; ++pass) {
      x -= ldlt.solve(slice.smooth.grad(x));
      res = slice.smooth.grad(x).norm();
    }
    if (std::isfinite(res) && res <= tol) {
      BatchOracleResult out;
      out.x_star = std::move(x);
      out.f_star = slice.smooth.eval(out.x_star);
      out.certificate = res;
      out.iterations = 0;
      return out;
    }
    // Singular or still inaccurate: fall through to the iterative path.
  }

  Vector x = prox(slice.reg, slice.set, alpha, Vector::Zero(n));
  Vector y = x;
  double t_k = 1.0;
  double best_res = std::numeric_limits<double>::infinity();
  Vector best_x = x;

  for (long it = 1; it <= max_iterations; ++it) {
    Vector g = slice.smooth.grad(y);
    Vector x_new = prox(slice.reg, slice.set, alpha, y - alpha * g);
    double res = (y - x_new).norm() / alpha;
    if (res < best_res) {
      best_res = res;
      best_x = x_new;
    }
    if (res <= tol) {
      auto [exact_res, p] = residual_at(x_new);
      (void)p;
      if (exact_res <= tol) {
        BatchOracleResult out;
        out.x_star = std::move(x_new);
        out.f_star = slice.objective(out.x_star);
        out.certificate = exact_res;
        out.iterations = it;
        return out;
      }
    }
    // Gradient-mapping adaptive restart keeps acceleration monotone.
    if ((y - x_new).dot(x_new - x) > 0.0) t_k = 1.0;
    double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_k * t_k));
    y = x_new + ((t_k - 1.0) / t_next) * (x_new - x);
    x = std::move(x_new);
    t_k = t_next;
  }

  BatchOracleResult best;
  best.x_star = std::move(best_x);
  best.f_star = slice.objective(best.x_star);
  best.certificate = best_res;
  best.iterations = max_iterations;
  throw ConvergenceFailure(std::move(best));
}

std::pair<Vector, Vector> batch_saddle_solve(const ProblemSlice& slice, double r,
                                             double alpha, double tol,
                                             long max_iterations) {
  if (!slice.constraints)
    throw ConfigError("batch_saddle_solve: slice has no constraint map");
  const ConstraintMap& con = *slice.constraints;
  Vector x = Vector::Zero(slice.dim);
  Vector lambda = Vector::Zero(con.count);
  for (long it = 0; it < max_iterations; ++it) {
    Vector v_primal =
        slice.smooth.grad(x) + con.jacobian(x).transpose() * lambda;
    Vector x_next = prox(slice.reg, slice.set, alpha, x - alpha * v_primal);
    Vector lambda_next =
        ((1.0 - alpha * r) * lambda + alpha * con.eval(x)).cwiseMax(0.0);
    double move = std::sqrt((x_next - x).squaredNorm() +
                            (lambda_next - lambda).squaredNorm()) /
                  alpha;
    x = std::move(x_next);
    lambda = std::move(lambda_next);
    if (move <= tol) return {x, lambda};
  }
  throw std::runtime_error("batch_saddle_solve: no fixed point within cap");
}

}  // namespace tvopt::solvers
