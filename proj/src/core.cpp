#include "tvopt/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace tvopt {

std::string format_g17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file for hashing: " + path);
  std::uint64_t h = kFnvOffset;
  char buf[1 << 15];
  while (in) {
    in.read(buf, sizeof(buf));
    h = fnv1a64(buf, static_cast<std::size_t>(in.gcount()), h);
  }
  return h;
}

RegularizerSpec RegularizerSpec::l1(double weight) {
  if (weight < 0.0) throw ConfigError("l1 weight must be >= 0");
  RegularizerSpec r;
  r.kind = Kind::L1;
  r.weight = weight;
  return r;
}

RegularizerSpec RegularizerSpec::nuclear(double weight, int rows, int cols) {
  if (weight < 0.0) throw ConfigError("nuclear weight must be >= 0");
  if (rows < 1 || cols < 1) throw ConfigError("nuclear shape must be positive");
  RegularizerSpec r;
  r.kind = Kind::Nuclear;
  r.weight = weight;
  r.nuclear_rows = rows;
  r.nuclear_cols = cols;
  return r;
}

RegularizerSpec RegularizerSpec::custom(
    std::function<double(const Vector&)> eval,
    std::function<Vector(const Vector&, double)> prox) {
  RegularizerSpec r;
  r.kind = Kind::Custom;
  r.custom_eval = std::move(eval);
  r.custom_prox = std::move(prox);
  return r;
}

double RegularizerSpec::eval(const Vector& x) const {
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::L1:
      return weight * x.lpNorm<1>();
    case Kind::Nuclear: {
      if (x.size() != static_cast<long>(nuclear_rows) * nuclear_cols)
        throw DimensionError("nuclear eval: size does not match matricization");
      Eigen::Map<const Matrix> m(x.data(), nuclear_rows, nuclear_cols);
      Eigen::JacobiSVD<Matrix> svd(m);
      return weight * svd.singularValues().sum();
    }
    case Kind::Custom:
      return custom_eval ? custom_eval(x) : 0.0;
  }
  return 0.0;
}

FeasibleSet FeasibleSet::all_space(int dim) {
  FeasibleSet s;
  s.kind = Kind::AllSpace;
  s.dim = dim;
  return s;
}

FeasibleSet FeasibleSet::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size())
    throw DimensionError("box: lower/upper size mismatch");
  if ((lower.array() > upper.array()).any())
    throw ConfigError("box: lower exceeds upper (empty set)");
  FeasibleSet s;
  s.kind = Kind::Box;
  s.dim = static_cast<int>(lower.size());
  s.lower = std::move(lower);
  s.upper = std::move(upper);
  return s;
}

FeasibleSet FeasibleSet::affine(Matrix a, Vector b) {
  if (a.rows() != b.size()) throw DimensionError("affine: rows(A) != size(b)");
  FeasibleSet s;
  s.kind = Kind::Affine;
  s.dim = static_cast<int>(a.cols());
  s.eq_a = std::move(a);
  s.eq_b = std::move(b);
  auto ldlt = std::make_shared<Eigen::LDLT<Matrix>>(s.eq_a * s.eq_a.transpose());
  if (ldlt->info() != Eigen::Success)
    throw ConfigError("affine: A A^T not factorizable (rows must be independent)");
  s.aat_ = std::move(ldlt);
  return s;
}

FeasibleSet FeasibleSet::nonneg_orthant(int dim) {
  FeasibleSet s;
  s.kind = Kind::NonnegOrthant;
  s.dim = dim;
  return s;
}

FeasibleSet FeasibleSet::custom(int dim,
                                std::function<Vector(const Vector&)> projection) {
  FeasibleSet s;
  s.kind = Kind::Custom;
  s.dim = dim;
  s.custom_projection = std::move(projection);
  return s;
}

Vector FeasibleSet::project(const Vector& y) const {
  if (y.size() != dim) throw DimensionError("project: input dimension mismatch");
  switch (kind) {
    case Kind::AllSpace:
      return y;
    case Kind::Box:
      return y.cwiseMax(lower).cwiseMin(upper);
    case Kind::Affine:
      return y - eq_a.transpose() * aat_->solve(eq_a * y - eq_b);
    case Kind::NonnegOrthant:
      return y.cwiseMax(0.0);
    case Kind::Custom:
      return custom_projection(y);
  }
  return y;
}

GradientNoiseModel GradientNoiseModel::bounded(double radius, std::uint64_t seed,
                                               Vector fixed_direction) {
  if (radius < 0.0) throw ConfigError("noise radius must be >= 0");
  GradientNoiseModel n;
  n.kind = Kind::BoundedDeterministic;
  n.radius = radius;
  n.seed = seed;
  n.fixed_direction = std::move(fixed_direction);
  return n;
}

GradientNoiseModel GradientNoiseModel::gaussian(double stddev, double clip,
                                                std::uint64_t seed) {
  if (stddev < 0.0 || clip < 0.0) throw ConfigError("noise parameters must be >= 0");
  GradientNoiseModel n;
  n.kind = Kind::Gaussian;
  n.stddev = stddev;
  n.clip = clip;
  n.seed = seed;
  return n;
}

namespace {

// Scales v down until ||v|| <= cap holds in floating point, not just in exact
// arithmetic.
void enforce_norm_cap(Vector& v, double cap) {
  double n = v.norm();
  if (n <= cap || n == 0.0) return;
  v *= cap / n;
  while (v.norm() > cap) v *= 1.0 - 4.0 * std::numeric_limits<double>::epsilon();
}

}  // namespace

Vector noise_error(const GradientNoiseModel& noise, int dim, Rng& rng) {
  switch (noise.kind) {
    case GradientNoiseModel::Kind::None:
      return Vector::Zero(dim);
    case GradientNoiseModel::Kind::BoundedDeterministic: {
      Vector e;
      if (noise.fixed_direction.size() > 0) {
        if (noise.fixed_direction.size() != dim)
          throw DimensionError("noise: fixed direction dimension mismatch");
        double n = noise.fixed_direction.norm();
        if (n == 0.0) return Vector::Zero(dim);
        e = noise.fixed_direction * (noise.radius / n);
      } else {
        e = random_unit_vector(dim, rng) * noise.radius;
      }
      enforce_norm_cap(e, noise.radius);
      return e;
    }
    case GradientNoiseModel::Kind::Gaussian: {
      Vector e = gaussian_vector(dim, rng) * noise.stddev;
      enforce_norm_cap(e, noise.clip);
      return e;
    }
    case GradientNoiseModel::Kind::Measurement:
      throw ConfigError(
          "measurement noise is generated by the owning problem generator");
  }
  return Vector::Zero(dim);
}

std::pair<Vector, double> inexact_gradient(const ProblemSlice& slice,
                                           const Vector& x,
                                           const GradientNoiseModel& noise,
                                           Rng& rng) {
  if (x.size() != slice.dim)
    throw DimensionError("inexact_gradient: iterate dimension mismatch");
  Vector g = slice.smooth.grad(x);
  if (noise.kind == GradientNoiseModel::Kind::None) return {g, 0.0};
  Vector e = noise_error(noise, slice.dim, rng);
  return {g - e, e.norm()};
}

Vector soft_threshold(const Vector& y, double threshold) {
  return y.unaryExpr([threshold](double v) {
    if (v > threshold) return v - threshold;
    if (v < -threshold) return v + threshold;
    return 0.0;
  });
}

Matrix singular_value_threshold(const Matrix& y, double threshold) {
  Eigen::JacobiSVD<Matrix> svd(y, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Vector s = soft_threshold(svd.singularValues(), threshold);
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

namespace {

const char* set_name(FeasibleSet::Kind k) {
  switch (k) {
    case FeasibleSet::Kind::AllSpace: return "all-space";
    case FeasibleSet::Kind::Box: return "box";
    case FeasibleSet::Kind::Affine: return "affine";
    case FeasibleSet::Kind::NonnegOrthant: return "nonneg-orthant";
    case FeasibleSet::Kind::Custom: return "custom";
  }
  return "?";
}

}  // namespace

Vector prox(const RegularizerSpec& reg, const FeasibleSet& set, double alpha,
            const Vector& y) {
  if (alpha <= 0.0) throw ConfigError("prox: alpha must be > 0");
  if (y.size() != set.dim) throw DimensionError("prox: input dimension mismatch");

  if (reg.kind == RegularizerSpec::Kind::Custom && reg.custom_prox)
    return reg.custom_prox(y, alpha);

  switch (reg.kind) {
    case RegularizerSpec::Kind::Zero:
      return set.project(y);
    case RegularizerSpec::Kind::L1: {
      // Soft threshold; separable, so clamping afterwards stays exact on a box.
      Vector s = soft_threshold(y, alpha * reg.weight);
      if (set.kind == FeasibleSet::Kind::AllSpace) return s;
      if (set.kind == FeasibleSet::Kind::Box)
        return s.cwiseMax(set.lower).cwiseMin(set.upper);
      throw ProxUnsupportedError(std::string("no closed-form prox: l1 over ") +
                                 set_name(set.kind));
    }
    case RegularizerSpec::Kind::Nuclear: {
      if (set.kind != FeasibleSet::Kind::AllSpace)
        throw ProxUnsupportedError(
            std::string("no closed-form prox: nuclear over ") + set_name(set.kind));
      if (y.size() != static_cast<long>(reg.nuclear_rows) * reg.nuclear_cols)
        throw DimensionError("prox: nuclear matricization mismatch");
      Eigen::Map<const Matrix> m(y.data(), reg.nuclear_rows, reg.nuclear_cols);
      Matrix out = singular_value_threshold(m, alpha * reg.weight);
      return Eigen::Map<Vector>(out.data(), out.size());
    }
    case RegularizerSpec::Kind::Custom:
      throw ProxUnsupportedError("custom regularizer without a prox");
  }
  throw ProxUnsupportedError("unsupported regularizer kind");
}

std::optional<ProblemSlice> advance(const ProblemGenerator& gen, TimeGrid& grid) {
  grid.validate();
  if (grid.t >= grid.horizon) return std::nullopt;
  ProblemSlice s = gen.slice_at(grid.t);
  grid.t += 1;
  return s;
}

}  // namespace tvopt
