#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tvopt/core.hpp"

using namespace tvopt;

namespace {

Vector vec(std::initializer_list<double> vals) {
  Vector v(static_cast<long>(vals.size()));
  long i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

// Minimal sliding-window generator over scalar records 1, 2, 3, ...
class CountingGen : public ProblemGenerator {
 public:
  CountingGen(int window, long horizon) : window_(window), horizon_(horizon) {}
  int dimension() const override { return 1; }
  long horizon() const override { return horizon_; }
  ProblemSlice slice_at(long t) const override {
    ProblemSlice s;
    s.t = t;
    s.dim = 1;
    s.window.window_length = window_;
    for (long tau = std::max<long>(0, t - window_ + 1); tau <= t; ++tau) {
      DataRecord rec;
      rec.tau = tau;
      rec.a = Matrix::Constant(1, 1, static_cast<double>(tau + 1));
      s.window.buffer.push_back(rec);
    }
    s.smooth.mu = 1.0;
    s.smooth.lip = 1.0;
    s.smooth.eval = [](const Vector& x) { return 0.5 * x.squaredNorm(); };
    s.smooth.grad = [](const Vector& x) -> Vector { return x; };
    s.reg = RegularizerSpec::zero();
    s.set = FeasibleSet::all_space(1);
    return s;
  }

 private:
  int window_;
  long horizon_;
};

}  // namespace

TEST_SUITE("prox") {
  TEST_CASE("identity when the regularizer is zero and the set is everything") {
    Vector y = vec({1.0, -2.0});
    Vector out = prox(RegularizerSpec::zero(), FeasibleSet::all_space(2), 0.5, y);
    CHECK(out == y);
  }

  TEST_CASE("l1 soft threshold matches the scalar grid oracle") {
    Vector y = vec({2.0});
    Vector out = prox(RegularizerSpec::l1(1.0), FeasibleSet::all_space(1), 1.0, y);
    CHECK(out[0] == doctest::Approx(1.0).epsilon(1e-12));

    double ref = oracles::min_scalar(
        [](double x) { return std::abs(x) + 0.5 * (x - 2.0) * (x - 2.0); }, -10,
        10);
    CHECK(out[0] == doctest::Approx(ref).epsilon(1e-7));
  }

  TEST_CASE("zero regularizer over a box clamps") {
    Vector out = prox(RegularizerSpec::zero(),
                      FeasibleSet::box(vec({0.0, 0.0}), vec({1.0, 1.0})), 1.0,
                      vec({-0.5, 2.0}));
    CHECK(out[0] == 0.0);
    CHECK(out[1] == 1.0);
  }

  TEST_CASE("unsupported pairs raise the no-closed-form error") {
    Matrix a(1, 2);
    a << 1.0, 1.0;
    FeasibleSet affine = FeasibleSet::affine(a, vec({1.0}));
    CHECK_THROWS_AS(prox(RegularizerSpec::l1(1.0), affine, 1.0, vec({0.0, 0.0})),
                    ProxUnsupportedError);
    CHECK_THROWS_AS(prox(RegularizerSpec::l1(1.0), FeasibleSet::nonneg_orthant(2),
                         1.0, vec({0.0, 0.0})),
                    ProxUnsupportedError);
    CHECK_THROWS_AS(prox(RegularizerSpec::nuclear(1.0, 1, 2),
                         FeasibleSet::nonneg_orthant(2), 1.0, vec({0.0, 0.0})),
                    ProxUnsupportedError);
  }

  TEST_CASE("input validation") {
    CHECK_THROWS_AS(prox(RegularizerSpec::zero(), FeasibleSet::all_space(2), 1.0,
                         vec({1.0})),
                    DimensionError);
    CHECK_THROWS_AS(prox(RegularizerSpec::zero(), FeasibleSet::all_space(1), 0.0,
                         vec({1.0})),
                    ConfigError);
  }

  TEST_CASE("projection idempotence on random probes") {
    Rng rng(7);
    Matrix a(1, 3);
    a << 1.0, 2.0, -1.0;
    std::vector<FeasibleSet> sets = {
        FeasibleSet::all_space(3),
        FeasibleSet::box(vec({-1.0, -0.5, 0.0}), vec({1.0, 0.5, 2.0})),
        FeasibleSet::nonneg_orthant(3),
        FeasibleSet::affine(a, vec({0.7})),
    };
    for (const auto& set : sets) {
      for (int i = 0; i < 1000; ++i) {
        Vector y = gaussian_vector(3, rng) * 3.0;
        Vector p = set.project(y);
        CHECK((set.project(p) - p).lpNorm<Eigen::Infinity>() <= 1e-12);
      }
    }
  }

  TEST_CASE("prox matches independent low-dimensional searches") {
    Rng rng(21);
    std::uniform_real_distribution<double> alpha_dist(0.1, 2.0);

    for (int trial = 0; trial < 40; ++trial) {
      double alpha = alpha_dist(rng);
      double weight = alpha_dist(rng);

      {  // l1 over all space (separable)
        Vector y = gaussian_vector(3, rng) * 2.0;
        Vector out = prox(RegularizerSpec::l1(weight), FeasibleSet::all_space(3),
                          alpha, y);
        Vector ref = oracles::min_separable(
            [&](int i, double x) {
              return weight * std::abs(x) +
                     (x - y[i]) * (x - y[i]) / (2.0 * alpha);
            },
            3, -8.0, 8.0);
        CHECK((out - ref).lpNorm<Eigen::Infinity>() <= 1e-5);
      }
      {  // l1 over a box (separable)
        Vector lo = vec({-0.5, -1.0, 0.0});
        Vector hi = vec({0.5, 2.0, 1.5});
        Vector y = gaussian_vector(3, rng) * 2.0;
        Vector out = prox(RegularizerSpec::l1(weight), FeasibleSet::box(lo, hi),
                          alpha, y);
        Vector ref(3);
        for (int i = 0; i < 3; ++i)
          ref[i] = oracles::min_scalar(
              [&](double x) {
                return weight * std::abs(x) +
                       (x - y[i]) * (x - y[i]) / (2.0 * alpha);
              },
              lo[i], hi[i]);
        CHECK((out - ref).lpNorm<Eigen::Infinity>() <= 1e-5);
      }
      {  // projection onto an affine set via null-space parameterization
        Matrix a(1, 2);
        a << 1.0, -2.0;
        Vector b = vec({0.4});
        Vector y = gaussian_vector(2, rng) * 2.0;
        Vector out = prox(RegularizerSpec::zero(), FeasibleSet::affine(a, b),
                          alpha, y);
        // x = x0 + u * n with n spanning ker(a)
        Vector x0 = a.colPivHouseholderQr().solve(b);
        Vector n = vec({2.0, 1.0});  // ker([1, -2])
        double u = oracles::min_scalar(
            [&](double t) { return (x0 + t * n - y).squaredNorm(); }, -8.0, 8.0);
        CHECK((out - (x0 + u * n)).lpNorm<Eigen::Infinity>() <= 1e-5);
      }
      {  // nuclear norm of a 1x2 matricization equals the vector 2-norm
        Vector y = gaussian_vector(2, rng) * 2.0;
        Vector out = prox(RegularizerSpec::nuclear(weight, 1, 2),
                          FeasibleSet::all_space(2), alpha, y);
        Vector ref = oracles::min_2d(
            [&](double u, double v) {
              return weight * std::hypot(u, v) +
                     ((u - y[0]) * (u - y[0]) + (v - y[1]) * (v - y[1])) /
                         (2.0 * alpha);
            },
            -8.0, 8.0);
        CHECK((out - ref).lpNorm<Eigen::Infinity>() <= 1e-5);
      }
    }
  }
}

TEST_SUITE("noise") {
  TEST_CASE("no injection when the kind is none") {
    CountingGen gen(2, 5);
    ProblemSlice slice = gen.slice_at(0);
    Rng rng(3);
    auto [v, e] = inexact_gradient(slice, vec({1.5}), GradientNoiseModel::none(),
                                   rng);
    CHECK(e == 0.0);
    CHECK(v[0] == 1.5);
  }

  TEST_CASE("bounded noise never exceeds its radius over many calls") {
    GradientNoiseModel noise = GradientNoiseModel::bounded(0.1, 5);
    Rng rng(noise.seed);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i)
      worst = std::max(worst, noise_error(noise, 4, rng).norm());
    CHECK(worst <= 0.1);
    CHECK(worst == doctest::Approx(0.1).epsilon(1e-12));
  }

  TEST_CASE("fixed direction bounded noise") {
    GradientNoiseModel noise = GradientNoiseModel::bounded(0.5, 0, vec({3.0, 4.0}));
    Rng rng(0);
    Vector e = noise_error(noise, 2, rng);
    CHECK(e[0] == doctest::Approx(0.3));
    CHECK(e[1] == doctest::Approx(0.4));
  }

  TEST_CASE("seeded gaussian noise replays identically") {
    GradientNoiseModel noise = GradientNoiseModel::gaussian(0.5, 1.0, 42);
    Rng rng_a(noise.seed), rng_b(noise.seed);
    for (int i = 0; i < 200; ++i) {
      Vector ea = noise_error(noise, 3, rng_a);
      Vector eb = noise_error(noise, 3, rng_b);
      CHECK(ea == eb);
      CHECK(ea.norm() <= 1.0 + 1e-15);
    }
  }

  TEST_CASE("measurement noise is owned by the generators") {
    GradientNoiseModel noise;
    noise.kind = GradientNoiseModel::Kind::Measurement;
    Rng rng(0);
    CHECK_THROWS_AS(noise_error(noise, 2, rng), ConfigError);
  }
}

TEST_SUITE("time axis") {
  TEST_CASE("advance yields slices until the horizon, then end of stream") {
    CountingGen gen(2, 3);
    TimeGrid grid{1.0, 3, 0};
    std::vector<std::vector<long>> windows;
    while (auto slice = advance(gen, grid)) {
      std::vector<long> taus;
      for (const auto& rec : slice->window.buffer) taus.push_back(rec.tau);
      windows.push_back(taus);
    }
    CHECK(windows.size() == 3);
    CHECK(windows[0] == std::vector<long>{0});
    CHECK(windows[1] == std::vector<long>{0, 1});
    CHECK(windows[2] == std::vector<long>{1, 2});
    CHECK(grid.t == 3);
    CHECK_FALSE(advance(gen, grid).has_value());
  }

  TEST_CASE("a static generator repeats the same slice apart from t") {
    CountingGen gen(1, 4);
    TimeGrid grid{1.0, 4, 0};
    Vector probe = vec({0.7});
    auto first = advance(gen, grid);
    while (auto s = advance(gen, grid)) {
      CHECK(s->smooth.eval(probe) == first->smooth.eval(probe));
      CHECK(s->t > first->t);
    }
  }

  TEST_CASE("grid validation") {
    TimeGrid bad{0.0, 10, 0};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    TimeGrid past{1.0, 10, 11};
    CHECK_THROWS_AS(past.validate(), ConfigError);
  }

  TEST_CASE("window eviction is oldest-first") {
    DataWindow w;
    w.window_length = 2;
    for (long tau = 0; tau < 3; ++tau) {
      DataRecord rec;
      rec.tau = tau;
      w.push(std::move(rec));
    }
    REQUIRE(w.buffer.size() == 2);
    CHECK(w.buffer[0].tau == 1);
    CHECK(w.buffer[1].tau == 2);
  }
}

TEST_SUITE("regularizer values") {
  TEST_CASE("nuclear norm evaluation") {
    // 2x2 diagonal matrix stored column-major: singular values 3 and 4.
    Vector y = vec({3.0, 0.0, 0.0, -4.0});
    RegularizerSpec reg = RegularizerSpec::nuclear(0.5, 2, 2);
    CHECK(reg.eval(y) == doctest::Approx(3.5));
  }

  TEST_CASE("finite differences confirm a hand-built smooth part") {
    SmoothPart sp;
    Matrix q(2, 2);
    q << 2.0, 0.3, 0.3, 1.0;
    sp.eval = [q](const Vector& x) { return 0.5 * x.dot(q * x); };
    sp.grad = [q](const Vector& x) -> Vector { return q * x; };
    Rng rng(11);
    for (int i = 0; i < 20; ++i) {
      Vector x = gaussian_vector(2, rng);
      Vector fd = oracles::central_difference_gradient(sp.eval, x);
      CHECK((fd - sp.grad(x)).norm() <= 1e-5 * (1.0 + sp.grad(x).norm()));
    }
  }
}
