#include "tvopt/problems.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace tvopt::problems {

namespace {

constexpr double kTwoPi = 6.283185307179586;

Matrix seeded_gaussian_matrix(int rows, int cols, Rng& rng) {
  Matrix m(rows, cols);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

Matrix orthonormal_columns(int rows, int cols, Rng& rng) {
  Matrix g = seeded_gaussian_matrix(rows, cols, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  return q;
}

}  // namespace

// ------------------------------ least squares ------------------------------

TVLeastSquaresGen::TVLeastSquaresGen(TVLeastSquaresConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.dim < 1 || cfg_.window < 1 || cfg_.horizon < 1)
    throw ConfigError("tv_least_squares: dim, window, horizon must be positive");
  if (cfg_.jump_times.size() != cfg_.jump_magnitudes.size())
    throw ConfigError("tv_least_squares: jump times/magnitudes length mismatch");
  Rng rng(derive_seed(cfg_.seed, 0x10f5));
  base_ = gaussian_vector(cfg_.dim, rng);
  phases_.resize(cfg_.dim);
  std::uniform_real_distribution<double> unif(0.0, kTwoPi);
  for (int i = 0; i < cfg_.dim; ++i) phases_[i] = unif(rng);
  for (std::size_t j = 0; j < cfg_.jump_times.size(); ++j) {
    Rng jr(derive_seed(cfg_.seed, 0x2a31, j));
    jump_directions_.push_back(random_unit_vector(cfg_.dim, jr) *
                               cfg_.jump_magnitudes[j]);
  }
}

Vector TVLeastSquaresGen::latent_solution(long tau) const {
  Vector x = base_;
  if (cfg_.drift_amplitude != 0.0) {
    for (int i = 0; i < cfg_.dim; ++i)
      x[i] += cfg_.drift_amplitude *
              std::sin(kTwoPi * static_cast<double>(tau) / cfg_.drift_period +
                       phases_[i]);
  }
  for (std::size_t j = 0; j < cfg_.jump_times.size(); ++j)
    if (tau >= cfg_.jump_times[j]) x += jump_directions_[j];
  return x;
}

DataRecord TVLeastSquaresGen::record_at(long tau) const {
  Rng rng(derive_seed(cfg_.seed, 0x77d1, static_cast<std::uint64_t>(tau)));
  DataRecord rec;
  rec.tau = tau;
  rec.a = seeded_gaussian_matrix(cfg_.rows_per_record, cfg_.dim, rng);
  rec.b = rec.a * latent_solution(tau);
  if (cfg_.data_noise_std > 0.0)
    rec.b += gaussian_vector(cfg_.rows_per_record, rng) * cfg_.data_noise_std;
  return rec;
}

ProblemSlice TVLeastSquaresGen::slice_at(long t) const {
  struct Quadratic {
    Matrix gram;
    Vector lin;
    double constant;
  };
  auto data = std::make_shared<Quadratic>();
  data->gram = Matrix::Zero(cfg_.dim, cfg_.dim);
  data->lin = Vector::Zero(cfg_.dim);
  data->constant = 0.0;

  ProblemSlice s;
  s.t = t;
  s.dim = cfg_.dim;
  s.window.window_length = cfg_.window;
  // The stream carries pre-history, so every slice sees a full window and the
  // window Gram stays positive definite.
  for (long tau = t - cfg_.window + 1; tau <= t; ++tau) {
    DataRecord rec = record_at(tau);
    data->gram += rec.a.transpose() * rec.a;
    data->lin += rec.a.transpose() * rec.b;
    data->constant += rec.b.squaredNorm();
    s.window.buffer.push_back(std::move(rec));
  }

  Eigen::SelfAdjointEigenSolver<Matrix> eig(data->gram);
  s.smooth.mu = std::max(0.0, eig.eigenvalues().minCoeff());
  s.smooth.lip = eig.eigenvalues().maxCoeff();
  s.smooth.is_quadratic = true;
  s.smooth.eval = [data](const Vector& x) {
    return 0.5 * x.dot(data->gram * x) - data->lin.dot(x) + 0.5 * data->constant;
  };
  s.smooth.grad = [data](const Vector& x) -> Vector {
    return data->gram * x - data->lin;
  };
  s.smooth.hessian = [data]() { return data->gram; };
  s.reg = RegularizerSpec::zero();
  s.set = FeasibleSet::all_space(cfg_.dim);
  return s;
}

TVLeastSquaresGen gen_fig1_instance(std::uint64_t seed) {
  TVLeastSquaresConfig cfg;  // n = 50, W = 50, T = 950, jumps at 250 and 550
  cfg.rows_per_record = 2;   // keeps the window Gram moderately conditioned
  cfg.seed = seed;
  return TVLeastSquaresGen(cfg);
}

// ---------------------------------- lasso ----------------------------------

TVLassoGen::TVLassoGen(TVLassoConfig cfg) : cfg_(std::move(cfg)), ls_(cfg_.data) {
  if (cfg_.lambda <= 0.0) throw ConfigError("tv_lasso: lambda must be > 0");
}

ProblemSlice TVLassoGen::slice_at(long t) const {
  ProblemSlice s = ls_.slice_at(t);
  // Unscaled residual sum: double the half-quadratic and its curvature.
  auto base_eval = s.smooth.eval;
  auto base_grad = s.smooth.grad;
  auto base_hess = s.smooth.hessian;
  s.smooth.eval = [base_eval](const Vector& x) { return 2.0 * base_eval(x); };
  s.smooth.grad = [base_grad](const Vector& x) -> Vector {
    return 2.0 * base_grad(x);
  };
  s.smooth.hessian = [base_hess]() -> Matrix { return 2.0 * base_hess(); };
  s.smooth.mu *= 2.0;
  s.smooth.lip *= 2.0;
  s.reg = RegularizerSpec::l1(cfg_.lambda);
  return s;
}

// ---------------------------------- RPCA -----------------------------------

RobustPCAStreamGen::RobustPCAStreamGen(RpcaStreamConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.pixels < 2 || cfg_.frames < 1 || cfg_.clips < 1)
    throw ConfigError("rpca: pixels, frames, clips must be positive");
  if (cfg_.rank < 1 || 2 * cfg_.rank > cfg_.pixels * cfg_.pixels ||
      cfg_.rank > cfg_.frames)
    throw ConfigError("rpca: rank out of range");
  if (cfg_.rho <= 0.0) throw ConfigError("rpca: rho must be > 0");
  const int p2 = cfg_.pixels * cfg_.pixels;
  Rng rng(derive_seed(cfg_.seed, 0x9c1e));
  basis_ = orthonormal_columns(p2, 2 * cfg_.rank, rng);
  right_basis_ = orthonormal_columns(cfg_.frames, cfg_.rank, rng);
  spectrum_.resize(cfg_.rank);
  double scale = cfg_.pixels * std::sqrt(static_cast<double>(cfg_.frames));
  for (int i = 0; i < cfg_.rank; ++i)
    spectrum_[i] = scale * (1.0 - 0.4 * i / std::max(1, cfg_.rank - 1));
}

double RobustPCAStreamGen::lambda() const {
  return cfg_.lambda < 0.0 ? 1.0 / cfg_.pixels : cfg_.lambda;
}

Matrix RobustPCAStreamGen::planted_background(long t) const {
  const int p2 = cfg_.pixels * cfg_.pixels;
  Matrix u(p2, cfg_.rank);
  for (int i = 0; i < cfg_.rank; ++i) {
    double angle = cfg_.background_drift * static_cast<double>(t) * (1.0 + 0.3 * i);
    u.col(i) = std::cos(angle) * basis_.col(i) +
               std::sin(angle) * basis_.col(cfg_.rank + i);
  }
  return u * spectrum_.asDiagonal() * right_basis_.transpose();
}

Matrix RobustPCAStreamGen::planted_foreground(long t) const {
  const int p2 = cfg_.pixels * cfg_.pixels;
  Rng rng(derive_seed(cfg_.seed, 0x51ab, static_cast<std::uint64_t>(t)));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_real_distribution<double> mag(1.0, 2.0);
  Matrix s = Matrix::Zero(p2, cfg_.frames);
  for (int j = 0; j < cfg_.frames; ++j)
    for (int i = 0; i < p2; ++i)
      if (unif(rng) < cfg_.sparse_fraction)
        s(i, j) = (unif(rng) < 0.5 ? -1.0 : 1.0) * mag(rng) * cfg_.sparse_scale;
  return s;
}

Matrix RobustPCAStreamGen::clip_at(long t) const {
  Matrix z = planted_background(t) + planted_foreground(t);
  if (cfg_.noise_std > 0.0) {
    Rng rng(derive_seed(cfg_.seed, 0xe3f7, static_cast<std::uint64_t>(t)));
    z += seeded_gaussian_matrix(static_cast<int>(z.rows()),
                                static_cast<int>(z.cols()), rng) *
         cfg_.noise_std;
  }
  return z;
}

ProblemSlice RobustPCAStreamGen::slice_at(long t) const {
  const int p2 = cfg_.pixels * cfg_.pixels;
  const int frames = cfg_.frames;
  auto z = std::make_shared<Matrix>(clip_at(t));
  const double rho = cfg_.rho;

  ProblemSlice s;
  s.t = t;
  s.dim = p2 * frames;
  s.window.window_length = 1;
  s.window.buffer.push_back(DataRecord{t, *z, Vector()});
  s.smooth.mu = 0.0;
  s.smooth.lip = rho;
  s.smooth.eval = [z, rho, p2, frames](const Vector& x) {
    Eigen::Map<const Matrix> sm(x.data(), p2, frames);
    return rpca_smooth_value(sm, *z, rho);
  };
  s.smooth.grad = [z, rho, p2, frames](const Vector& x) -> Vector {
    Eigen::Map<const Matrix> sm(x.data(), p2, frames);
    Matrix g = rpca_smooth_gradient(sm, *z, rho).first;
    return Eigen::Map<Vector>(g.data(), g.size());
  };
  s.reg = RegularizerSpec::l1(lambda());
  s.set = FeasibleSet::all_space(s.dim);
  return s;
}

std::pair<Matrix, Matrix> rpca_smooth_gradient(const Matrix& s, const Matrix& z,
                                               double rho) {
  if (s.rows() != z.rows() || s.cols() != z.cols())
    throw DimensionError("rpca_smooth_gradient: shape mismatch");
  if (rho <= 0.0) throw ConfigError("rpca_smooth_gradient: rho must be > 0");
  Matrix inner = singular_value_threshold(z - s, 1.0 / rho);
  Matrix grad = rho * (inner + s - z);
  return {std::move(grad), std::move(inner)};
}

double rpca_smooth_value(const Matrix& s, const Matrix& z, double rho) {
  Matrix inner = singular_value_threshold(z - s, 1.0 / rho);
  Eigen::JacobiSVD<Matrix> svd(inner);
  return svd.singularValues().sum() +
         0.5 * rho * (inner + s - z).squaredNorm();
}

double rpca_objective(const Matrix& s, const Matrix& z, double lambda, double rho) {
  return lambda * s.cwiseAbs().sum() + rpca_smooth_value(s, z, rho);
}

// ----------------------------------- SSC -----------------------------------

SSCStreamGen::SSCStreamGen(SscStreamConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.points < 2) throw ConfigError("ssc: need at least two points");
  if (cfg_.subspaces < 1 || cfg_.subspace_dim < 1 ||
      cfg_.subspace_dim > cfg_.ambient)
    throw ConfigError("ssc: bad subspace shape");
  for (int k = 0; k < cfg_.subspaces; ++k) {
    Rng rng(derive_seed(cfg_.seed, 0xb5c3, k));
    bases_.push_back(orthonormal_columns(cfg_.ambient, cfg_.subspace_dim, rng));
  }
}

int SSCStreamGen::subspace_of(long tau) const {
  return static_cast<int>(tau % cfg_.subspaces);
}

Vector SSCStreamGen::data_point(long tau) const {
  Rng rng(derive_seed(cfg_.seed, 0x44aa, static_cast<std::uint64_t>(tau)));
  Vector coeff = gaussian_vector(cfg_.subspace_dim, rng);
  Vector z = bases_[subspace_of(tau)] * coeff;
  if (cfg_.point_noise > 0.0)
    z += gaussian_vector(cfg_.ambient, rng) * cfg_.point_noise;
  return z;
}

Matrix SSCStreamGen::window_matrix(long t) const {
  // Circular-buffer slots: point tau lives in column tau mod N, so advancing
  // the stream replaces exactly one column and warm starts stay aligned.
  // The window moves once every refresh_every time steps.
  long pos = cfg_.refresh_every > 1 ? t / cfg_.refresh_every : t;
  Matrix z(cfg_.ambient, cfg_.points);
  for (long tau = pos; tau < pos + cfg_.points; ++tau)
    z.col(tau % cfg_.points) = data_point(tau);
  return z;
}

Matrix SSCStreamGen::similarity(const Matrix& x) {
  return x.cwiseAbs() + x.transpose().cwiseAbs();
}

ProblemSlice SSCStreamGen::slice_at(long t) const {
  const int n = cfg_.points;
  auto z = std::make_shared<Matrix>(window_matrix(t));
  auto gram = std::make_shared<Matrix>(z->transpose() * (*z));
  const double lambda = cfg_.lambda;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(*gram);

  ProblemSlice s;
  s.t = t;
  s.dim = n * n;
  s.window.window_length = n;
  for (int j = 0; j < n; ++j)
    s.window.buffer.push_back(DataRecord{t + j, z->col(j), Vector()});
  s.smooth.mu = std::max(0.0, eig.eigenvalues().minCoeff());
  s.smooth.lip = eig.eigenvalues().maxCoeff();
  s.smooth.is_quadratic = true;
  s.smooth.eval = [z, n](const Vector& x) {
    Eigen::Map<const Matrix> xm(x.data(), n, n);
    return 0.5 * ((*z) * xm - (*z)).squaredNorm();
  };
  s.smooth.grad = [z, gram, n](const Vector& x) -> Vector {
    Eigen::Map<const Matrix> xm(x.data(), n, n);
    Matrix g = (*gram) * xm - (*gram);
    return Eigen::Map<Vector>(g.data(), g.size());
  };
  s.reg = RegularizerSpec::custom(
      [lambda, n](const Vector& x) {
        return lambda * x.lpNorm<1>();
      },
      [lambda, n](const Vector& y, double alpha) -> Vector {
        Eigen::Map<const Matrix> ym(y.data(), n, n);
        Matrix out = ssc_prox(ym, alpha, lambda);
        return Eigen::Map<Vector>(out.data(), out.size());
      });
  s.set = FeasibleSet::custom(n * n, [n](const Vector& y) -> Vector {
    Eigen::Map<const Matrix> ym(y.data(), n, n);
    Matrix out = ssc_project(ym);
    return Eigen::Map<Vector>(out.data(), out.size());
  });
  return s;
}

Matrix ssc_project(const Matrix& x) {
  const long n = x.rows();
  if (n != x.cols()) throw DimensionError("ssc_project: matrix must be square");
  if (n < 2) throw ConfigError("ssc_project: need at least two points");
  Matrix out = x;
  for (long j = 0; j < n; ++j) {
    out(j, j) = 0.0;
    double sum = out.col(j).sum();
    double shift = (1.0 - sum) / static_cast<double>(n - 1);
    for (long i = 0; i < n; ++i)
      if (i != j) out(i, j) += shift;
  }
  return out;
}

namespace {

double soft_scalar(double v, double k) {
  if (v > k) return v - k;
  if (v < -k) return v + k;
  return 0.0;
}

// Solves min_x lambda sum |x_i| + ||x - y||^2 / (2 alpha) s.t. sum_i x_i = 1
// over the off-diagonal entries of one column. The stationarity system gives
// x_i = soft(y_i - u, alpha lambda) for a scalar shift u fixed by the sum
// constraint; the sum is piecewise linear and non-increasing in u, so u is
// found exactly from the sorted breakpoints.
void ssc_prox_column(const double* y, double* x, long n, long j, double k) {
  std::vector<double> bps;
  bps.reserve(2 * (n - 1));
  for (long i = 0; i < n; ++i) {
    if (i == j) continue;
    bps.push_back(y[i] - k);
    bps.push_back(y[i] + k);
  }
  std::sort(bps.begin(), bps.end());

  auto phi = [&](double u) {
    double s = 0.0;
    for (long i = 0; i < n; ++i)
      if (i != j) s += soft_scalar(y[i] - u, k);
    return s - 1.0;
  };

  const double m = static_cast<double>(n - 1);
  double u;
  if (phi(bps.front()) <= 0.0) {
    // Root lies left of all breakpoints, where the slope is exactly -m.
    u = bps.front() + phi(bps.front()) / m;
  } else if (phi(bps.back()) > 0.0) {
    u = bps.back() + phi(bps.back()) / m;
  } else {
    std::size_t lo = 0, hi = bps.size() - 1;
    while (hi - lo > 1) {
      std::size_t mid = (lo + hi) / 2;
      if (phi(bps[mid]) > 0.0)
        lo = mid;
      else
        hi = mid;
    }
    double fl = phi(bps[lo]), fh = phi(bps[hi]);
    u = fl == fh ? bps[lo] : bps[lo] + fl * (bps[hi] - bps[lo]) / (fl - fh);
  }

  for (long i = 0; i < n; ++i) x[i] = i == j ? 0.0 : soft_scalar(y[i] - u, k);
}

}  // namespace

Matrix ssc_prox(const Matrix& y, double alpha, double lambda) {
  const long n = y.rows();
  if (n != y.cols()) throw DimensionError("ssc_prox: matrix must be square");
  if (n < 2) throw ConfigError("ssc_prox: need at least two points");
  Matrix out(n, n);
  const double k = alpha * lambda;
  for (long j = 0; j < n; ++j)
    ssc_prox_column(y.col(j).data(), out.col(j).data(), n, j, k);
  return out;
}

// ------------------------------ feedback plant -----------------------------

NetworkFeedbackGen::NetworkFeedbackGen(NetworkFeedbackConfig cfg)
    : cfg_(std::move(cfg)) {
  if (cfg_.outputs < cfg_.inputs)
    throw ConfigError("network_feedback: outputs must be >= inputs");
  Rng rng(derive_seed(cfg_.seed, 0x7e12));
  a_ = seeded_gaussian_matrix(cfg_.outputs, cfg_.inputs, rng) /
       std::sqrt(static_cast<double>(cfg_.outputs));
  b_ = seeded_gaussian_matrix(cfg_.outputs, cfg_.exogenous, rng) /
       std::sqrt(static_cast<double>(cfg_.outputs));
  a_model_ = a_;
  if (cfg_.model_mismatch > 0.0)
    a_model_ += seeded_gaussian_matrix(cfg_.outputs, cfg_.inputs, rng) *
                cfg_.model_mismatch;
  std::uniform_real_distribution<double> unif(0.0, kTwoPi);
  exo_phases_.resize(cfg_.exogenous);
  for (int i = 0; i < cfg_.exogenous; ++i) exo_phases_[i] = unif(rng);
  target_phases_.resize(cfg_.outputs);
  for (int i = 0; i < cfg_.outputs; ++i) target_phases_[i] = unif(rng);
}

Vector NetworkFeedbackGen::exogenous_at(long t) const {
  Vector w(cfg_.exogenous);
  for (int i = 0; i < cfg_.exogenous; ++i)
    w[i] = cfg_.exo_amplitude *
           std::sin(kTwoPi * static_cast<double>(t) / cfg_.exo_period +
                    exo_phases_[i]);
  return w;
}

Vector NetworkFeedbackGen::target_at(long t) const {
  Vector s(cfg_.outputs);
  for (int i = 0; i < cfg_.outputs; ++i)
    s[i] = cfg_.target_amplitude *
           std::cos(kTwoPi * static_cast<double>(t) / cfg_.target_period +
                    target_phases_[i]);
  return s;
}

Vector NetworkFeedbackGen::output_at(long t, const Vector& x) const {
  if (x.size() != cfg_.inputs)
    throw DimensionError("network_feedback: input dimension mismatch");
  return a_ * x + b_ * exogenous_at(t);
}

ProblemSlice NetworkFeedbackGen::slice_at(long t) const {
  auto gram = std::make_shared<Matrix>(a_.transpose() * a_);
  auto drive = std::make_shared<Vector>(b_ * exogenous_at(t) - target_at(t));
  const Matrix& a = a_;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(*gram);

  ProblemSlice s;
  s.t = t;
  s.dim = cfg_.inputs;
  s.smooth.mu = std::max(0.0, eig.eigenvalues().minCoeff());
  s.smooth.lip = eig.eigenvalues().maxCoeff();
  s.smooth.is_quadratic = true;
  s.smooth.eval = [a, drive](const Vector& x) {
    return 0.5 * (a * x + *drive).squaredNorm();
  };
  s.smooth.grad = [a, drive](const Vector& x) -> Vector {
    return a.transpose() * (a * x + *drive);
  };
  s.smooth.hessian = [gram]() { return *gram; };
  s.reg = RegularizerSpec::zero();
  s.set = FeasibleSet::all_space(cfg_.inputs);
  return s;
}

std::pair<Vector, double> network_feedback_gradient(const NetworkFeedbackGen& gen,
                                                    long t, const Vector& x,
                                                    Rng& rng) {
  const auto& cfg = gen.config();
  Vector s = gen.output_at(t, x);
  Vector s_hat = s;
  if (cfg.sensor_noise_radius > 0.0)
    s_hat += random_unit_vector(static_cast<int>(s.size()), rng) *
             cfg.sensor_noise_radius;
  Vector v = gen.plant_a().transpose() * (s_hat - gen.target_at(t));
  Vector grad = gen.plant_a().transpose() * (s - gen.target_at(t));
  return {v, (v - grad).norm()};
}

// -------------------------------- consensus --------------------------------

double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

ConsensusCostGen::ConsensusCostGen(ConsensusCostConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.nodes < 1) throw ConfigError("consensus: need at least one node");
  Rng rng(derive_seed(cfg_.seed, 0xc0de));
  std::uniform_real_distribution<double> ua(-10.0, 10.0);
  std::uniform_real_distribution<double> uphi(0.0, kTwoPi);
  a_.resize(cfg_.nodes);
  phi_.resize(cfg_.nodes);
  for (int i = 0; i < cfg_.nodes; ++i) a_[i] = ua(rng);
  for (int i = 0; i < cfg_.nodes; ++i) phi_[i] = uphi(rng);
}

double ConsensusCostGen::target(int i, long t) const {
  return cfg_.amplitude *
         std::cos((cfg_.omega - cfg_.b_freq) * static_cast<double>(t) + phi_[i]);
}

double ConsensusCostGen::local_cost(int i, long t, double x) const {
  double d = x - target(i, t);
  return 0.5 * d * d + softplus(x - a_[i]);
}

double ConsensusCostGen::local_gradient(int i, long t, double x) const {
  return (x - target(i, t)) + logistic(x - a_[i]);
}

ProblemSlice ConsensusCostGen::aggregate_slice(long t) const {
  ProblemSlice s;
  s.t = t;
  s.dim = 1;
  const ConsensusCostGen* self = this;
  s.smooth.mu = static_cast<double>(cfg_.nodes) * mu();
  s.smooth.lip = static_cast<double>(cfg_.nodes) * lip();
  s.smooth.eval = [self, t](const Vector& x) {
    double total = 0.0;
    for (int i = 0; i < self->nodes(); ++i) total += self->local_cost(i, t, x[0]);
    return total;
  };
  s.smooth.grad = [self, t](const Vector& x) -> Vector {
    double total = 0.0;
    for (int i = 0; i < self->nodes(); ++i)
      total += self->local_gradient(i, t, x[0]);
    Vector g(1);
    g[0] = total;
    return g;
  };
  s.reg = RegularizerSpec::zero();
  s.set = FeasibleSet::all_space(1);
  return s;
}

double consensus_local_gradient(const ConsensusCostGen& gen, int i, long t,
                                double x) {
  if (i < 0 || i >= gen.nodes())
    throw ConfigError("consensus_local_gradient: node index out of range");
  return gen.local_gradient(i, t, x);
}

}  // namespace tvopt::problems
