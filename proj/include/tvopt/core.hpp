#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "tvopt/common.hpp"

namespace tvopt {

/// Discretized time axis: sampling interval delta, total step count, cursor.
struct TimeGrid {
  double delta = 1.0;
  long horizon = 0;
  long t = 0;

  void validate() const {
    if (delta <= 0.0) throw ConfigError("TimeGrid: delta must be > 0");
    if (horizon < 0) throw ConfigError("TimeGrid: horizon must be >= 0");
    if (t < 0 || t > horizon) throw ConfigError("TimeGrid: t out of [0, horizon]");
  }
};

/// One streamed data record: arrival index plus a matrix/vector payload.
struct DataRecord {
  long tau = 0;
  Matrix a;
  Vector b;
};

/// Sliding FIFO window of the most recent records (oldest evicted first).
struct DataWindow {
  int window_length = 0;
  std::vector<DataRecord> buffer;

  void push(DataRecord rec) {
    buffer.push_back(std::move(rec));
    while (window_length > 0 &&
           buffer.size() > static_cast<std::size_t>(window_length)) {
      buffer.erase(buffer.begin());
    }
  }
};

/// Smooth cost component: value/gradient callables plus curvature constants.
/// mu <= lip always; is_quadratic unlocks direct solves and exact line search.
struct SmoothPart {
  std::function<double(const Vector&)> eval;
  std::function<Vector(const Vector&)> grad;
  double mu = 0.0;
  double lip = 1.0;
  bool is_quadratic = false;
  /// Optional constant Hessian accessor, only meaningful when is_quadratic.
  std::function<Matrix()> hessian;
};

/// Nonsmooth regularizer. Custom kind may carry a prox that also encodes the
/// feasible set (the pair is then handled jointly by prox()).
struct RegularizerSpec {
  enum class Kind { Zero, L1, Nuclear, Custom };

  Kind kind = Kind::Zero;
  double weight = 0.0;
  int nuclear_rows = 0;
  int nuclear_cols = 0;
  std::function<double(const Vector&)> custom_eval;
  std::function<Vector(const Vector&, double)> custom_prox;

  static RegularizerSpec zero() { return {}; }
  static RegularizerSpec l1(double weight);
  static RegularizerSpec nuclear(double weight, int rows, int cols);
  static RegularizerSpec custom(std::function<double(const Vector&)> eval,
                                std::function<Vector(const Vector&, double)> prox);

  double eval(const Vector& x) const;
};

/// Non-empty closed convex feasible set with an exact Euclidean projection.
struct FeasibleSet {
  enum class Kind { AllSpace, Box, Affine, NonnegOrthant, Custom };

  Kind kind = Kind::AllSpace;
  int dim = 0;
  Vector lower, upper;   // Box
  Matrix eq_a;           // Affine: eq_a * x = eq_b
  Vector eq_b;
  std::function<Vector(const Vector&)> custom_projection;

  static FeasibleSet all_space(int dim);
  static FeasibleSet box(Vector lower, Vector upper);
  static FeasibleSet affine(Matrix a, Vector b);
  static FeasibleSet nonneg_orthant(int dim);
  static FeasibleSet custom(int dim, std::function<Vector(const Vector&)> projection);

  Vector project(const Vector& y) const;

 private:
  // Cached factorization of eq_a * eq_a^T for affine projections.
  std::shared_ptr<const Eigen::LDLT<Matrix>> aat_;
};

/// Vector-valued convex constraint c(x) <= 0 with Jacobian access.
/// jac_bound is a sup-norm bound on the Jacobian used when assembling
/// Lipschitz constants of the primal-dual operator.
struct ConstraintMap {
  std::function<Vector(const Vector&)> eval;
  std::function<Matrix(const Vector&)> jacobian;
  int count = 0;
  double jac_bound = 0.0;
};

/// The time-t problem snapshot a solver sees: f_t = smooth + reg over set,
/// optionally with dualizable constraints, plus the data window behind it.
struct ProblemSlice {
  long t = 0;
  int dim = 0;
  SmoothPart smooth;
  RegularizerSpec reg;
  FeasibleSet set;
  std::optional<ConstraintMap> constraints;
  DataWindow window;

  double objective(const Vector& x) const {
    return smooth.eval(x) + reg.eval(x);
  }
};

/// How the gradient surrogate deviates from the true gradient.
/// Measurement-kind noise is produced by the owning problem generator.
struct GradientNoiseModel {
  enum class Kind { None, BoundedDeterministic, Gaussian, Measurement };

  Kind kind = Kind::None;
  double radius = 0.0;                      // BoundedDeterministic
  Vector fixed_direction;                   // optional fixed error direction
  double stddev = 0.0;                      // Gaussian
  double clip = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;

  static GradientNoiseModel none() { return {}; }
  static GradientNoiseModel bounded(double radius, std::uint64_t seed,
                                    Vector fixed_direction = {});
  static GradientNoiseModel gaussian(double stddev, double clip, std::uint64_t seed);
};

/// Draws the additive error vector e for one oracle call; ||e|| respects the
/// model's bound for bounded kinds.
Vector noise_error(const GradientNoiseModel& noise, int dim, Rng& rng);

/// Returns (v, e_true) with v = grad - e and e_true = ||grad - v||.
std::pair<Vector, double> inexact_gradient(const ProblemSlice& slice,
                                           const Vector& x,
                                           const GradientNoiseModel& noise,
                                           Rng& rng);

/// Proximal step: argmin over the set of reg(x) + ||x - y||^2 / (2 alpha).
/// Supported pairs: zero with any built-in set, l1 with all-space or box,
/// nuclear with all-space, and custom regularizers carrying their own prox.
Vector prox(const RegularizerSpec& reg, const FeasibleSet& set, double alpha,
            const Vector& y);

Vector soft_threshold(const Vector& y, double threshold);
Matrix singular_value_threshold(const Matrix& y, double threshold);

/// Per-step record of one online run. t = 0 holds the initial point evaluated
/// against the first slice; records t >= 1 hold post-update iterates.
struct TraceRecord {
  long t = 0;
  Vector x;
  std::optional<Vector> lambda;
  double f_value = 0.0;
  Vector v;
  double e_true = 0.0;
  double wall_seconds = 0.0;
};

struct IterateTrace {
  std::vector<TraceRecord> records;

  std::size_t size() const { return records.size(); }
  const TraceRecord& operator[](std::size_t i) const { return records[i]; }
};

/// A deterministic stream of problem slices. Generators are immutable after
/// construction; slice_at(t) may be called from concurrent runs.
class ProblemGenerator {
 public:
  virtual ~ProblemGenerator() = default;
  virtual int dimension() const = 0;
  virtual long horizon() const = 0;
  virtual ProblemSlice slice_at(long t) const = 0;
};

/// Yields the next slice and advances the cursor; empty at end of stream.
std::optional<ProblemSlice> advance(const ProblemGenerator& gen, TimeGrid& grid);

}  // namespace tvopt
