#pragma once

#include <utility>
#include <vector>

#include "tvopt/core.hpp"

namespace tvopt::problems {

// ---------------------------------------------------------------------------
// Time-varying least squares over a sliding data window.
// Smooth cost 0.5 * sum_{tau in window} ||A_tau x - b_tau||^2, so the declared
// curvature pair is (lambda_min, lambda_max) of the window Gram matrix.
// ---------------------------------------------------------------------------

struct TVLeastSquaresConfig {
  int dim = 50;
  int window = 50;
  long horizon = 950;
  int rows_per_record = 1;
  std::vector<long> jump_times = {250, 550};
  std::vector<double> jump_magnitudes = {10.0, 10.0};
  double drift_amplitude = 0.5;
  double drift_period = 300.0;
  double data_noise_std = 0.0;
  std::uint64_t seed = 0;
};

class TVLeastSquaresGen : public ProblemGenerator {
 public:
  explicit TVLeastSquaresGen(TVLeastSquaresConfig cfg);

  int dimension() const override { return cfg_.dim; }
  long horizon() const override { return cfg_.horizon; }
  ProblemSlice slice_at(long t) const override;

  /// Latent solution path the data is generated around (drift plus jumps).
  Vector latent_solution(long tau) const;
  DataRecord record_at(long tau) const;
  const TVLeastSquaresConfig& config() const { return cfg_; }

 private:
  TVLeastSquaresConfig cfg_;
  Vector base_;
  Vector phases_;
  std::vector<Vector> jump_directions_;
};

/// The 50-dimensional sliding-window instance with solution jumps near
/// t = 250 and t = 550.
TVLeastSquaresGen gen_fig1_instance(std::uint64_t seed);

// ---------------------------------------------------------------------------
// l1-regularized variant. The smooth part keeps the unscaled form
// sum ||A x - b||^2, so its curvature pair is twice the window Gram's.
// ---------------------------------------------------------------------------

struct TVLassoConfig {
  TVLeastSquaresConfig data;
  double lambda = 0.1;
};

class TVLassoGen : public ProblemGenerator {
 public:
  explicit TVLassoGen(TVLassoConfig cfg);
  int dimension() const override { return ls_.dimension(); }
  long horizon() const override { return ls_.horizon(); }
  ProblemSlice slice_at(long t) const override;
  const TVLassoConfig& config() const { return cfg_; }

 private:
  TVLassoConfig cfg_;
  TVLeastSquaresGen ls_;
};

// ---------------------------------------------------------------------------
// Streaming robust PCA: per clip, split Z into sparse S (variable) plus the
// low-rank background absorbed into the smooth part.
// ---------------------------------------------------------------------------

struct RpcaStreamConfig {
  int pixels = 12;   // p; one frame is p^2 pixels
  int frames = 15;   // columns per clip
  long clips = 40;
  int rank = 2;
  double sparse_fraction = 0.05;
  double sparse_scale = 3.0;
  double noise_std = 0.01;
  double lambda = -1.0;  // < 0 means the default 1/p
  double rho = 10.0;
  double background_drift = 0.05;  // subspace rotation angle per clip
  std::uint64_t seed = 0;
};

class RobustPCAStreamGen : public ProblemGenerator {
 public:
  explicit RobustPCAStreamGen(RpcaStreamConfig cfg);

  int dimension() const override { return cfg_.pixels * cfg_.pixels * cfg_.frames; }
  long horizon() const override { return cfg_.clips; }
  ProblemSlice slice_at(long t) const override;

  Matrix clip_at(long t) const;                // observed Z_t
  Matrix planted_background(long t) const;     // low-rank component
  Matrix planted_foreground(long t) const;     // sparse component
  double lambda() const;
  const RpcaStreamConfig& config() const { return cfg_; }

 private:
  RpcaStreamConfig cfg_;
  Matrix basis_;        // p^2 x 2r orthonormal columns (rotation planes)
  Matrix right_basis_;  // frames x r orthonormal
  Vector spectrum_;
};

/// Gradient of the smoothed RPCA cost at S: returns (rho (L + S - Z), L) with
/// L the singular-value soft threshold of Z - S at level 1/rho.
std::pair<Matrix, Matrix> rpca_smooth_gradient(const Matrix& s, const Matrix& z,
                                               double rho);

/// Value of the smoothed cost: min over L of ||L||_* + rho/2 ||L + S - Z||_F^2.
double rpca_smooth_value(const Matrix& s, const Matrix& z, double rho);

/// Full objective lambda ||S||_1 + rpca_smooth_value.
double rpca_objective(const Matrix& s, const Matrix& z, double lambda, double rho);

// ---------------------------------------------------------------------------
// Online sparse self-expressive representation over a sliding point window.
// Variable X is N x N with diag(X) = 0 and columns summing to one.
// ---------------------------------------------------------------------------

struct SscStreamConfig {
  int ambient = 8;
  int points = 24;  // N, window size
  int subspaces = 2;
  int subspace_dim = 2;
  double lambda = 0.05;
  double point_noise = 0.01;
  int refresh_every = 1;  // time steps between window advances
  long horizon = 250;
  std::uint64_t seed = 0;
};

class SSCStreamGen : public ProblemGenerator {
 public:
  explicit SSCStreamGen(SscStreamConfig cfg);

  int dimension() const override { return cfg_.points * cfg_.points; }
  long horizon() const override { return cfg_.horizon; }
  ProblemSlice slice_at(long t) const override;

  Vector data_point(long tau) const;
  int subspace_of(long tau) const;
  Matrix window_matrix(long t) const;  // ambient x points
  /// |X| + |X^T| similarity matrix for a learned coefficient matrix.
  static Matrix similarity(const Matrix& x);
  const SscStreamConfig& config() const { return cfg_; }

 private:
  SscStreamConfig cfg_;
  std::vector<Matrix> bases_;  // ambient x subspace_dim, orthonormal
};

/// Exact Euclidean projection onto {diag(X) = 0, X^T 1 = 1} (per column).
Matrix ssc_project(const Matrix& x);

/// Exact prox of lambda ||.||_1 restricted to the same affine set, solved per
/// column by a piecewise-linear dual search over the soft-threshold shift.
Matrix ssc_prox(const Matrix& y, double alpha, double lambda);

// ---------------------------------------------------------------------------
// Measurement-based feedback: plant s = A x + B w_t, cost drives the output
// to a target, gradient proxy built from a noisy output measurement.
// ---------------------------------------------------------------------------

struct NetworkFeedbackConfig {
  int inputs = 4;
  int outputs = 6;
  int exogenous = 3;
  long horizon = 400;
  double target_amplitude = 2.0;
  double target_period = 120.0;
  double exo_amplitude = 1.0;
  double exo_period = 77.0;
  double sensor_noise_radius = 0.1;
  double model_mismatch = 0.0;  // optional perturbation scale on A used by v_t
  std::uint64_t seed = 0;
};

class NetworkFeedbackGen : public ProblemGenerator {
 public:
  explicit NetworkFeedbackGen(NetworkFeedbackConfig cfg);

  int dimension() const override { return cfg_.inputs; }
  long horizon() const override { return cfg_.horizon; }
  ProblemSlice slice_at(long t) const override;

  const Matrix& plant_a() const { return a_; }
  const Matrix& plant_b() const { return b_; }
  Vector exogenous_at(long t) const;
  Vector target_at(long t) const;
  Vector output_at(long t, const Vector& x) const;  // s_t
  const NetworkFeedbackConfig& config() const { return cfg_; }

 private:
  NetworkFeedbackConfig cfg_;
  Matrix a_, b_, a_model_;
  Vector exo_phases_, target_phases_;
};

/// Measured-gradient proxy v = A^T (s_hat - target) with s_hat a noisy output
/// measurement; also returns e_true = ||v - grad h_t(x)||.
std::pair<Vector, double> network_feedback_gradient(const NetworkFeedbackGen& gen,
                                                    long t, const Vector& x,
                                                    Rng& rng);

// ---------------------------------------------------------------------------
// Per-node scalar consensus costs: quadratic pull to a moving target plus a
// softplus barrier, 1-strongly convex and 1.25-smooth.
// ---------------------------------------------------------------------------

struct ConsensusCostConfig {
  int nodes = 20;
  double amplitude = 2.5;
  double omega = 0.039269908169872414;   // pi / 80
  double b_freq = 0.015707963267948967;  // pi / 200
  std::uint64_t seed = 0;
};

class ConsensusCostGen {
 public:
  explicit ConsensusCostGen(ConsensusCostConfig cfg);

  int nodes() const { return cfg_.nodes; }
  double target(int i, long t) const;
  double local_cost(int i, long t, double x) const;
  double local_gradient(int i, long t, double x) const;
  double mu() const { return 1.0; }
  double lip() const { return 1.25; }
  const std::vector<double>& offsets() const { return a_; }
  const ConsensusCostConfig& config() const { return cfg_; }

  /// Centralized sum of the node costs at time t (dimension 1).
  ProblemSlice aggregate_slice(long t) const;

 private:
  ConsensusCostConfig cfg_;
  std::vector<double> a_, phi_;
};

double consensus_local_gradient(const ConsensusCostGen& gen, int i, long t,
                                double x);

/// Overflow-safe log(1 + exp(z)) and its derivative.
double softplus(double z);
double logistic(double z);

}  // namespace tvopt::problems
