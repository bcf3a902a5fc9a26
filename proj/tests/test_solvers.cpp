#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tvopt/solvers.hpp"

using namespace tvopt;
using namespace tvopt::solvers;

namespace {

Vector vec(std::initializer_list<double> vals) {
  Vector v(static_cast<long>(vals.size()));
  long i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

ProblemSlice quadratic_slice(const Matrix& q, const Vector& center,
                             bool advertise_quadratic = true) {
  auto qp = std::make_shared<Matrix>(q);
  auto cp = std::make_shared<Vector>(center);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(q);
  ProblemSlice s;
  s.dim = static_cast<int>(center.size());
  s.smooth.mu = std::max(0.0, eig.eigenvalues().minCoeff());
  s.smooth.lip = eig.eigenvalues().maxCoeff();
  s.smooth.is_quadratic = advertise_quadratic;
  s.smooth.eval = [qp, cp](const Vector& x) {
    Vector d = x - *cp;
    return 0.5 * d.dot((*qp) * d);
  };
  s.smooth.grad = [qp, cp](const Vector& x) -> Vector { return (*qp) * (x - *cp); };
  s.smooth.hessian = [qp]() { return *qp; };
  s.reg = RegularizerSpec::zero();
  s.set = FeasibleSet::all_space(s.dim);
  return s;
}

// The scalar constrained instance: h = x^2/2, one constraint 1 - x <= 0.
ProblemSlice scalar_constrained_slice() {
  ProblemSlice s;
  s.dim = 1;
  s.smooth.mu = 1.0;
  s.smooth.lip = 1.0;
  s.smooth.eval = [](const Vector& x) { return 0.5 * x.squaredNorm(); };
  s.smooth.grad = [](const Vector& x) -> Vector { return x; };
  s.reg = RegularizerSpec::zero();
  s.set = FeasibleSet::all_space(1);
  ConstraintMap con;
  con.count = 1;
  con.eval = [](const Vector& x) -> Vector { return vec({1.0 - x[0]}); };
  con.jacobian = [](const Vector&) -> Matrix {
    return Matrix::Constant(1, 1, -1.0);
  };
  con.jac_bound = 1.0;
  s.constraints = con;
  return s;
}

// Saddle of the scalar regularized instance via analytic inner maximization
// plus an outer golden-section search (independent of the iterative path).
std::pair<double, double> scalar_saddle_oracle(double r) {
  auto value = [r](double x) {
    double lam = std::max(0.0, (1.0 - x) / r);
    return 0.5 * x * x + lam * (1.0 - x) - 0.5 * r * lam * lam;
  };
  double x = oracles::min_scalar(value, -2.0, 2.0);
  return {x, std::max(0.0, (1.0 - x) / r)};
}

}  // namespace

TEST_SUITE("prox gradient") {
  TEST_CASE("one exact step with alpha = 1/L lands on the minimizer") {
    ProblemSlice s = quadratic_slice(Matrix::Identity(1, 1), vec({3.0}));
    ProxGradState st{vec({0.0}), 1.0, 1};
    Rng rng(0);
    TraceRecord rec = prox_grad_step(st, s, GradientNoiseModel::none(), rng);
    CHECK(st.x[0] == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(rec.e_true == 0.0);
    CHECK(rec.f_value == doctest::Approx(0.0));
  }

  TEST_CASE("gradient step plus soft threshold matches the scalar oracle") {
    ProblemSlice s = quadratic_slice(Matrix::Identity(1, 1), vec({0.0}));
    s.reg = RegularizerSpec::l1(1.0);
    ProxGradState st{vec({2.0}), 0.5, 1};
    Rng rng(0);
    prox_grad_step(st, s, GradientNoiseModel::none(), rng);
    CHECK(st.x[0] == doctest::Approx(0.5).epsilon(1e-15));

    // Independent check: minimize |u| + (u - 1)^2 / (2 * 0.5) after the
    // gradient step to 1.
    double ref = oracles::min_scalar(
        [](double u) { return std::abs(u) + (u - 1.0) * (u - 1.0); }, -4.0, 4.0);
    CHECK(st.x[0] == doctest::Approx(ref).epsilon(1e-7));
  }

  TEST_CASE("contraction factor arithmetic") {
    CHECK(contraction_factor(0.25, 1.0, 4.0) == doctest::Approx(0.75));
    CHECK(contraction_factor(0.5, 1.0, 2.0) == doctest::Approx(0.5));
  }

  TEST_CASE("Q-linear decay on a static strongly convex quadratic") {
    Rng rng(5);
    Matrix g(6, 4);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 6; ++i) g(i, j) = normal(rng);
    Matrix q = g.transpose() * g + 0.5 * Matrix::Identity(4, 4);
    Vector center = gaussian_vector(4, rng);
    ProblemSlice s = quadratic_slice(q, center);
    double alpha = 1.5 / s.smooth.lip;
    double qfac = contraction_factor(alpha, s.smooth.mu, s.smooth.lip);
    REQUIRE(qfac < 1.0);

    ProxGradState st{Vector::Zero(4), alpha, 1};
    double base = (st.x - center).norm();
    Rng noise_rng(0);
    for (int k = 1; k <= 120; ++k) {
      prox_grad_step(st, s, GradientNoiseModel::none(), noise_rng);
      CHECK((st.x - center).norm() <=
            std::pow(qfac, k) * base * (1.0 + 1e-9));
    }
  }

  TEST_CASE("with no regularizer and no set it is exactly a gradient step") {
    Rng rng(9);
    Matrix q = Matrix::Identity(3, 3) * 1.7;
    Vector center = gaussian_vector(3, rng);
    ProblemSlice s = quadratic_slice(q, center);
    Vector x = gaussian_vector(3, rng);
    ProxGradState st{x, 0.3, 1};
    Rng noise_rng(0);
    prox_grad_step(st, s, GradientNoiseModel::none(), noise_rng);
    Vector manual = x - 0.3 * (q * (x - center));
    CHECK(st.x == manual);  // bit-for-bit
  }

  TEST_CASE("the trace record reflects the first inner step") {
    ProblemSlice s = quadratic_slice(Matrix::Identity(2, 2), vec({1.0, -2.0}));
    Vector dir = vec({1.0, 0.0});
    GradientNoiseModel noise = GradientNoiseModel::bounded(0.25, 0, dir);
    ProxGradState st{vec({3.0, 3.0}), 0.2, 4};
    Rng rng(0);
    Vector x_start = st.x;
    TraceRecord rec = prox_grad_step(st, s, noise, rng);
    CHECK(rec.e_true == doctest::Approx(0.25));
    Vector expected_v = s.smooth.grad(x_start) - 0.25 * dir;
    CHECK((rec.v - expected_v).norm() <= 1e-15);
    CHECK(rec.x == st.x);  // final iterate after all inner steps
  }

  TEST_CASE("recorded errors match recomputation from the logged surrogate") {
    // e_t must equal ||grad h_t(x_{t-1}) - v_t|| when recomputed from the
    // slices and the previous iterate.
    Rng rng(31);
    Matrix q(3, 3);
    q << 2.0, 0.1, 0.0, 0.1, 1.5, 0.2, 0.0, 0.2, 1.0;
    GradientNoiseModel noise = GradientNoiseModel::gaussian(0.3, 1.0, 77);
    Rng noise_rng(noise.seed);
    ProxGradState st{gaussian_vector(3, rng), 0.3, 1};
    Vector prev = st.x;
    for (long t = 1; t <= 50; ++t) {
      Vector center = gaussian_vector(3, rng);
      ProblemSlice s = quadratic_slice(q, center);
      s.t = t;
      TraceRecord rec = prox_grad_step(st, s, noise, noise_rng);
      double recomputed = (s.smooth.grad(prev) - rec.v).norm();
      CHECK(rec.e_true == doctest::Approx(recomputed).epsilon(1e-12));
      prev = st.x;
    }
  }

  TEST_CASE("K inner steps equal K single steps against the same slice") {
    ProblemSlice s = quadratic_slice(Matrix::Identity(2, 2), vec({1.0, -2.0}));
    Rng rng(0);
    ProxGradState multi{Vector::Zero(2), 0.4, 3};
    prox_grad_step(multi, s, GradientNoiseModel::none(), rng);
    ProxGradState single{Vector::Zero(2), 0.4, 1};
    for (int i = 0; i < 3; ++i)
      prox_grad_step(single, s, GradientNoiseModel::none(), rng);
    CHECK(multi.x == single.x);
  }
}

TEST_SUITE("primal dual") {
  TEST_CASE("an inactive constraint keeps the multiplier at zero") {
    ProblemSlice s = scalar_constrained_slice();
    s.constraints->eval = [](const Vector& x) -> Vector {
      return vec({x[0] - 10.0});
    };
    s.constraints->jacobian = [](const Vector&) -> Matrix {
      return Matrix::Constant(1, 1, 1.0);
    };
    PrimalDualState st{vec({0.0}), vec({0.0}), 0.2, 0.1,
                       DualRule::GradientAscent};
    Rng rng(0);
    primal_dual_step(st, s, GradientNoiseModel::none(), rng);
    CHECK(st.lambda[0] == 0.0);
  }

  TEST_CASE("converges to the regularized saddle point of the scalar instance") {
    ProblemSlice s = scalar_constrained_slice();
    PrimalDualState st{vec({0.0}), vec({0.0}), 0.1, 0.1,
                       DualRule::GradientAscent};
    Rng rng(0);
    for (int k = 0; k < 4000; ++k)
      primal_dual_step(st, s, GradientNoiseModel::none(), rng);
    CHECK(st.x[0] == doctest::Approx(1.0 / 1.1).epsilon(1e-9));
    CHECK(st.lambda[0] == doctest::Approx(1.0 / 1.1).epsilon(1e-9));

    auto [xs, ls] = scalar_saddle_oracle(0.1);
    CHECK(st.x[0] == doctest::Approx(xs).epsilon(1e-6));
    CHECK(st.lambda[0] == doctest::Approx(ls).epsilon(1e-6));
  }

  TEST_CASE("one as-printed dual update") {
    ProblemSlice s = scalar_constrained_slice();
    PrimalDualState st{vec({0.0}), vec({1.0}), 0.1, 0.1, DualRule::AsPrinted};
    Rng rng(0);
    primal_dual_step(st, s, GradientNoiseModel::none(), rng);
    // (1 - r) * 1 + alpha * c(0) = 0.9 + 0.1 * 1 = 1.0
    CHECK(st.lambda[0] == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("multipliers stay nonnegative under random steps") {
    ProblemSlice s = scalar_constrained_slice();
    Rng rng(33);
    GradientNoiseModel noise = GradientNoiseModel::gaussian(2.0, 5.0, 17);
    for (auto rule : {DualRule::GradientAscent, DualRule::AsPrinted}) {
      PrimalDualState st{vec({0.0}), vec({0.0}), 0.15, 0.05, rule};
      for (int k = 0; k < 500; ++k) {
        primal_dual_step(st, s, noise, rng);
        CHECK(st.lambda[0] >= 0.0);
      }
    }
  }

  TEST_CASE("a slice without constraints is a configuration error") {
    ProblemSlice s = quadratic_slice(Matrix::Identity(1, 1), vec({0.0}));
    PrimalDualState st{vec({0.0}), vec({0.0}), 0.1, 0.1,
                       DualRule::GradientAscent};
    Rng rng(0);
    CHECK_THROWS_AS(primal_dual_step(st, s, GradientNoiseModel::none(), rng),
                    ConfigError);
  }

  TEST_CASE("distance to the saddle contracts monotonically after burn-in") {
    ProblemSlice s = scalar_constrained_slice();
    const double r = 0.1;
    auto [xs, ls] = scalar_saddle_oracle(r);
    // lip_pd for [[1, -1], [1, r]] via singular values.
    Matrix op(2, 2);
    op << 1.0, -1.0, 1.0, r;
    double lip_pd = Eigen::JacobiSVD<Matrix>(op).singularValues().maxCoeff();
    double mu_low = std::min(1.0, r);
    double alpha = 0.9 * 2.0 * mu_low / (lip_pd * lip_pd);

    PrimalDualState st{vec({0.0}), vec({0.0}), alpha, r,
                       DualRule::GradientAscent};
    Rng rng(0);
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 400; ++k) {
      primal_dual_step(st, s, GradientNoiseModel::none(), rng);
      double dist = std::hypot(st.x[0] - xs, st.lambda[0] - ls);
      if (k >= 10) CHECK(dist <= prev * (1.0 + 1e-12));
      prev = dist;
    }
    CHECK(prev <= 1e-6);
  }
}

TEST_SUITE("static methods") {
  TEST_CASE("heavy ball with zero momentum is exactly gradient descent") {
    Rng rng(4);
    Matrix q = Matrix::Identity(3, 3) * 2.0;
    Vector center = gaussian_vector(3, rng);
    ProblemSlice s = quadratic_slice(q, center);

    StaticMethodConfig hb{StaticMethod::HeavyBall, 0.2, 0.0, false};
    StaticMethodConfig gd{StaticMethod::GradientDescent, 0.2, 0.0, false};
    auto sa = StaticMethodState::init(Vector::Zero(3));
    auto sb = StaticMethodState::init(Vector::Zero(3));
    for (int k = 0; k < 25; ++k) {
      static_method_step(hb, s, sa);
      static_method_step(gd, s, sb);
      CHECK(sa.x == sb.x);
    }
  }

  TEST_CASE("exact line search solves a 1-D quadratic in one step") {
    ProblemSlice s = quadratic_slice(Matrix::Identity(1, 1), vec({1.0}));
    StaticMethodConfig cg{StaticMethod::NonlinearCg, 1.0, 0.0, false};
    auto st = StaticMethodState::init(vec({0.0}));
    static_method_step(cg, s, st);
    CHECK(st.x[0] == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("conjugate directions finish a quadratic within dimension steps") {
    Rng rng(12);
    Matrix g(8, 6);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int j = 0; j < 6; ++j)
      for (int i = 0; i < 8; ++i) g(i, j) = normal(rng);
    Matrix q = g.transpose() * g + 0.1 * Matrix::Identity(6, 6);
    Vector center = gaussian_vector(6, rng);
    ProblemSlice s = quadratic_slice(q, center);
    StaticMethodConfig cg{StaticMethod::NonlinearCg, 1.0, 0.0, false};
    auto st = StaticMethodState::init(Vector::Zero(6));
    for (int k = 0; k < 8; ++k) static_method_step(cg, s, st);
    CHECK((st.x - center).norm() <= 1e-9 * (1.0 + center.norm()));
  }

  TEST_CASE("exact line search refuses non-quadratic or constrained problems") {
    ProblemSlice s = quadratic_slice(Matrix::Identity(1, 1), vec({0.0}), false);
    StaticMethodConfig cg{StaticMethod::NonlinearCg, 1.0, 0.0, false};
    auto st = StaticMethodState::init(vec({2.0}));
    CHECK_THROWS_AS(static_method_step(cg, s, st), ConfigError);

    ProblemSlice with_reg = quadratic_slice(Matrix::Identity(1, 1), vec({0.0}));
    with_reg.reg = RegularizerSpec::l1(0.5);
    CHECK_THROWS_AS(static_method_step(cg, with_reg, st), ConfigError);
  }

  TEST_CASE("accelerated rate on a mu=1, L=4 quadratic") {
    // Momentum coefficient (sqrt(L) - sqrt(mu)) / (sqrt(L) + sqrt(mu)) = 1/3;
    // the observed linear rate should sit near 1 - sqrt(mu/L) = 0.5, far
    // below gradient descent's 1 - mu/L = 0.75.
    Matrix q(2, 2);
    q << 1.0, 0.0, 0.0, 4.0;
    Vector center = vec({1.0, -1.0});
    ProblemSlice s = quadratic_slice(q, center);

    StaticMethodConfig v2{StaticMethod::NesterovV2, 0.25, 0.0, false};
    auto st = StaticMethodState::init(Vector::Zero(2));
    std::vector<double> ks, logs;
    for (int k = 1; k <= 40; ++k) {
      static_method_step(v2, s, st);
      double err = (st.x - center).norm();
      if (k >= 10 && err > 1e-13) {
        ks.push_back(k);
        logs.push_back(std::log(err));
      }
    }
    double slope = 0.0;
    oracles::slope_r_squared(ks, logs, &slope);
    double rate = std::exp(slope);
    CHECK(rate > 0.3);
    CHECK(rate < 0.65);
  }

  TEST_CASE("restart on slice change resets momentum") {
    ProblemSlice a = quadratic_slice(Matrix::Identity(1, 1), vec({5.0}));
    a.t = 0;
    ProblemSlice b = quadratic_slice(Matrix::Identity(1, 1), vec({-5.0}));
    b.t = 1;
    StaticMethodConfig hb{StaticMethod::HeavyBall, 0.1, 0.9, true};
    auto st = StaticMethodState::init(vec({0.0}));
    for (int k = 0; k < 10; ++k) static_method_step(hb, a, st);
    double x_before = st.x[0];
    static_method_step(hb, b, st);
    // With momentum cleared, the first step on the new slice is plain descent.
    CHECK(st.x[0] ==
          doctest::Approx(x_before - 0.1 * (x_before + 5.0)).epsilon(1e-14));
  }
}

TEST_SUITE("batch oracle") {
  TEST_CASE("identity quadratic solves directly") {
    ProblemSlice s = quadratic_slice(Matrix::Identity(2, 2), vec({1.0, 2.0}));
    BatchOracleResult res = batch_solve(s);
    CHECK((res.x_star - vec({1.0, 2.0})).norm() <= 1e-12);
    CHECK(res.f_star == doctest::Approx(0.0));
    CHECK(res.iterations == 0);
    CHECK(res.certificate <= 1e-10);
  }

  TEST_CASE("iterative path agrees with the direct path") {
    Rng rng(2);
    Matrix g(5, 3);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 5; ++i) g(i, j) = normal(rng);
    Matrix q = g.transpose() * g + 0.2 * Matrix::Identity(3, 3);
    Vector center = gaussian_vector(3, rng);
    BatchOracleResult direct = batch_solve(quadratic_slice(q, center));
    BatchOracleResult fista = batch_solve(quadratic_slice(q, center, false));
    CHECK((direct.x_star - fista.x_star).norm() <= 1e-8);
    CHECK(fista.certificate <= 1e-10);
    CHECK(fista.f_star ==
          doctest::Approx(fista.x_star.size()
                              ? quadratic_slice(q, center).objective(fista.x_star)
                              : 0.0)
              .epsilon(1e-8));
  }

  TEST_CASE("scalar lasso matches the grid oracle") {
    ProblemSlice s = quadratic_slice(Matrix::Identity(1, 1), vec({2.0}));
    s.reg = RegularizerSpec::l1(1.0);
    BatchOracleResult res = batch_solve(s);
    CHECK(res.x_star[0] == doctest::Approx(1.0).epsilon(1e-9));
    double ref = oracles::min_scalar(
        [](double x) { return 0.5 * (x - 2.0) * (x - 2.0) + std::abs(x); }, -6.0,
        6.0);
    CHECK(res.x_star[0] == doctest::Approx(ref).epsilon(1e-6));
  }

  TEST_CASE("the iteration cap raises a failure carrying the best iterate") {
    Matrix q(2, 2);
    q << 1.0, 0.0, 0.0, 1e-4;  // badly conditioned
    ProblemSlice s = quadratic_slice(q, vec({1.0, 1.0}), false);
    CHECK_THROWS_AS(batch_solve(s, 1e-12, 3), ConvergenceFailure);
    try {
      batch_solve(s, 1e-12, 3);
    } catch (const ConvergenceFailure& failure) {
      CHECK(failure.best.x_star.size() == 2);
      CHECK(std::isfinite(failure.best.f_star));
      CHECK(failure.best.certificate > 0.0);
    }
  }

  TEST_CASE("saddle solver reproduces the closed-form regularized saddle") {
    ProblemSlice s = scalar_constrained_slice();
    auto [x, lambda] = batch_saddle_solve(s, 0.1, 0.05, 1e-13);
    CHECK(x[0] == doctest::Approx(1.0 / 1.1).epsilon(1e-10));
    CHECK(lambda[0] == doctest::Approx(1.0 / 1.1).epsilon(1e-10));
  }
}
