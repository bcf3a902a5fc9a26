#include "tvopt/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tvopt/distributed.hpp"
#include "tvopt/solvers.hpp"

namespace fs = std::filesystem;

namespace tvopt::cli {

// ----------------------------- toy quadratic -------------------------------

ToyQuadraticGen::ToyQuadraticGen(ToyQuadraticConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.dim < 1 || cfg_.horizon < 1)
    throw ConfigError("quadratic: dim and horizon must be positive");
  int rank = cfg_.rank < 0 ? cfg_.dim : cfg_.rank;
  if (rank < 1 || rank > cfg_.dim) throw ConfigError("quadratic: bad rank");

  Vector d(rank);
  for (int i = 0; i < rank; ++i) {
    double v = cfg_.eigenvalues.empty()
                   ? 1.0
                   : cfg_.eigenvalues[std::min<std::size_t>(
                         i, cfg_.eigenvalues.size() - 1)];
    if (v <= 0.0) throw ConfigError("quadratic: eigenvalues must be > 0");
    d[i] = v;
  }

  Matrix q;
  if (cfg_.rotate) {
    Rng rng(derive_seed(cfg_.seed, 0x0a5d));
    Matrix g(cfg_.dim, rank);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int j = 0; j < rank; ++j)
      for (int i = 0; i < cfg_.dim; ++i) g(i, j) = normal(rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    q = qr.householderQ() * Matrix::Identity(cfg_.dim, rank);
  } else {
    q = Matrix::Identity(cfg_.dim, rank);
  }
  h_ = q * d.asDiagonal() * q.transpose();

  Rng rng(derive_seed(cfg_.seed, 0x3b1c));
  base_ = Vector::Zero(cfg_.dim);
  phases_.resize(cfg_.dim);
  std::uniform_real_distribution<double> unif(0.0, 6.283185307179586);
  for (int i = 0; i < cfg_.dim; ++i) phases_[i] = unif(rng);
}

Vector ToyQuadraticGen::center_at(long t) const {
  Vector c = base_;
  if (cfg_.drift == "linear") {
    if (cfg_.drift_axis < 0 || cfg_.drift_axis >= cfg_.dim)
      throw ConfigError("quadratic: drift_axis out of range");
    c[cfg_.drift_axis] += cfg_.drift_step * static_cast<double>(t);
  } else if (cfg_.drift == "sin") {
    for (int i = 0; i < cfg_.dim; ++i)
      c[i] += cfg_.drift_amplitude *
              std::sin(6.283185307179586 * static_cast<double>(t) /
                           cfg_.drift_period +
                       phases_[i]);
  } else if (cfg_.drift != "none") {
    throw ConfigError("quadratic: drift must be none, linear or sin");
  }
  return c;
}

ProblemSlice ToyQuadraticGen::slice_at(long t) const {
  auto center = std::make_shared<Vector>(center_at(t));
  auto h = std::make_shared<Matrix>(h_);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(*h);

  ProblemSlice s;
  s.t = t;
  s.dim = cfg_.dim;
  s.smooth.mu = std::max(0.0, eig.eigenvalues().minCoeff());
  s.smooth.lip = eig.eigenvalues().maxCoeff();
  s.smooth.is_quadratic = true;
  s.smooth.eval = [h, center](const Vector& x) {
    Vector d = x - *center;
    return 0.5 * d.dot((*h) * d);
  };
  s.smooth.grad = [h, center](const Vector& x) -> Vector {
    return (*h) * (x - *center);
  };
  s.smooth.hessian = [h]() { return *h; };
  s.reg = RegularizerSpec::zero();
  s.set = FeasibleSet::all_space(cfg_.dim);
  return s;
}

// -------------------------- constrained quadratic ---------------------------

ConstrainedQuadraticGen::ConstrainedQuadraticGen(ConstrainedQuadraticConfig cfg)
    : cfg_(std::move(cfg)) {
  if (cfg_.dim < 1 || cfg_.horizon < 1)
    throw ConfigError("constrained_quadratic: dim and horizon must be positive");
  if (static_cast<int>(cfg_.constraint_row.size()) != cfg_.dim)
    throw ConfigError("constrained_quadratic: constraint_row size != dim");
  row_ = Eigen::Map<const Vector>(cfg_.constraint_row.data(), cfg_.dim);
  if (row_.norm() == 0.0)
    throw ConfigError("constrained_quadratic: constraint_row must be nonzero");
}

ProblemSlice ConstrainedQuadraticGen::slice_at(long t) const {
  ProblemSlice s;
  s.t = t;
  s.dim = cfg_.dim;
  s.smooth.mu = 1.0;
  s.smooth.lip = 1.0;
  s.smooth.is_quadratic = true;
  s.smooth.eval = [](const Vector& x) { return 0.5 * x.squaredNorm(); };
  s.smooth.grad = [](const Vector& x) -> Vector { return x; };
  const int dim = cfg_.dim;
  s.smooth.hessian = [dim]() -> Matrix { return Matrix::Identity(dim, dim); };
  s.reg = RegularizerSpec::zero();
  s.set = FeasibleSet::all_space(cfg_.dim);

  Vector row = row_;
  double offset = cfg_.constraint_offset;
  ConstraintMap con;
  con.count = 1;
  con.eval = [row, offset](const Vector& x) -> Vector {
    Vector c(1);
    c[0] = offset - row.dot(x);
    return c;
  };
  con.jacobian = [row](const Vector&) -> Matrix {
    return -row.transpose();
  };
  con.jac_bound = row.norm();
  s.constraints = con;
  return s;
}

ProblemSlice ConstrainedQuadraticGen::oracle_slice_at(long t) const {
  ProblemSlice s = slice_at(t);
  s.constraints.reset();
  s.smooth.is_quadratic = false;  // keep the solve on the projected path
  Vector row = row_;
  double offset = cfg_.constraint_offset;
  s.set = FeasibleSet::custom(cfg_.dim, [row, offset](const Vector& y) -> Vector {
    double slack = offset - row.dot(y);
    if (slack <= 0.0) return y;
    return y + (slack / row.squaredNorm()) * row;
  });
  return s;
}

double ConstrainedQuadraticGen::pd_lipschitz(double r) const {
  const int n = cfg_.dim;
  Matrix op(n + 1, n + 1);
  op.setZero();
  op.topLeftCorner(n, n) = Matrix::Identity(n, n);
  op.topRightCorner(n, 1) = -row_;
  op.bottomLeftCorner(1, n) = row_.transpose();
  op(n, n) = r;
  Eigen::JacobiSVD<Matrix> svd(op);
  return svd.singularValues().maxCoeff();
}

// ------------------------------ config helpers ------------------------------

namespace {

struct GeneratorBundle {
  std::unique_ptr<ProblemGenerator> gen;
  const problems::NetworkFeedbackGen* feedback = nullptr;
  const ConstrainedQuadraticGen* constrained = nullptr;
  long horizon = 0;
};

GeneratorBundle build_generator(const ConfigFile& cfg) {
  SectionReader problem(cfg, "problem");
  std::string name = problem.require("generator");
  std::uint64_t seed = static_cast<std::uint64_t>(problem.integer("seed", 0));
  long horizon_override = problem.integer("horizon", -1);

  GeneratorBundle out;
  if (name == "tv_least_squares" || name == "tv_lasso") {
    problems::TVLeastSquaresConfig c;
    c.seed = seed;
    c.dim = static_cast<int>(problem.integer("dim", c.dim));
    c.window = static_cast<int>(problem.integer("window", c.window));
    c.horizon = horizon_override > 0 ? horizon_override : c.horizon;
    c.rows_per_record =
        static_cast<int>(problem.integer("rows_per_record", c.rows_per_record));
    c.jump_times = problem.integer_list("jump_times", c.jump_times);
    c.jump_magnitudes = problem.number_list("jump_magnitudes", c.jump_magnitudes);
    c.drift_amplitude = problem.number("drift_amplitude", c.drift_amplitude);
    c.drift_period = problem.number("drift_period", c.drift_period);
    c.data_noise_std = problem.number("data_noise_std", c.data_noise_std);
    if (name == "tv_lasso") {
      problems::TVLassoConfig lc;
      lc.data = c;
      lc.lambda = problem.number("lambda", 0.1);
      out.gen = std::make_unique<problems::TVLassoGen>(lc);
    } else {
      out.gen = std::make_unique<problems::TVLeastSquaresGen>(c);
    }
  } else if (name == "rpca_stream") {
    problems::RpcaStreamConfig c;
    c.seed = seed;
    c.pixels = static_cast<int>(problem.integer("pixels", c.pixels));
    c.frames = static_cast<int>(problem.integer("frames", c.frames));
    c.clips = horizon_override > 0 ? horizon_override : c.clips;
    c.rank = static_cast<int>(problem.integer("rank", c.rank));
    c.sparse_fraction = problem.number("sparse_fraction", c.sparse_fraction);
    c.sparse_scale = problem.number("sparse_scale", c.sparse_scale);
    c.noise_std = problem.number("noise_std", c.noise_std);
    c.lambda = problem.number("lambda", c.lambda);
    c.rho = problem.number("rho", c.rho);
    c.background_drift = problem.number("background_drift", c.background_drift);
    out.gen = std::make_unique<problems::RobustPCAStreamGen>(c);
  } else if (name == "ssc_stream") {
    problems::SscStreamConfig c;
    c.seed = seed;
    c.ambient = static_cast<int>(problem.integer("ambient", c.ambient));
    c.points = static_cast<int>(problem.integer("points", c.points));
    c.subspaces = static_cast<int>(problem.integer("subspaces", c.subspaces));
    c.subspace_dim =
        static_cast<int>(problem.integer("subspace_dim", c.subspace_dim));
    c.lambda = problem.number("lambda", c.lambda);
    c.point_noise = problem.number("point_noise", c.point_noise);
    c.refresh_every =
        static_cast<int>(problem.integer("refresh_every", c.refresh_every));
    c.horizon = horizon_override > 0 ? horizon_override : c.horizon;
    out.gen = std::make_unique<problems::SSCStreamGen>(c);
  } else if (name == "network_feedback") {
    problems::NetworkFeedbackConfig c;
    c.seed = seed;
    c.inputs = static_cast<int>(problem.integer("inputs", c.inputs));
    c.outputs = static_cast<int>(problem.integer("outputs", c.outputs));
    c.exogenous = static_cast<int>(problem.integer("exogenous", c.exogenous));
    c.horizon = horizon_override > 0 ? horizon_override : c.horizon;
    c.target_amplitude = problem.number("target_amplitude", c.target_amplitude);
    c.target_period = problem.number("target_period", c.target_period);
    c.exo_amplitude = problem.number("exo_amplitude", c.exo_amplitude);
    c.exo_period = problem.number("exo_period", c.exo_period);
    c.sensor_noise_radius =
        problem.number("sensor_noise_radius", c.sensor_noise_radius);
    c.model_mismatch = problem.number("model_mismatch", c.model_mismatch);
    auto gen = std::make_unique<problems::NetworkFeedbackGen>(c);
    out.feedback = gen.get();
    out.gen = std::move(gen);
  } else if (name == "quadratic") {
    ToyQuadraticConfig c;
    c.seed = seed;
    c.dim = static_cast<int>(problem.integer("dim", c.dim));
    c.horizon = horizon_override > 0 ? horizon_override : c.horizon;
    c.eigenvalues = problem.number_list("eigenvalues", c.eigenvalues);
    c.rank = static_cast<int>(problem.integer("rank", c.rank));
    c.rotate = problem.flag("rotate", c.rotate);
    c.drift = problem.get("drift", c.drift);
    c.drift_step = problem.number("drift_step", c.drift_step);
    c.drift_axis = static_cast<int>(problem.integer("drift_axis", c.drift_axis));
    c.drift_amplitude = problem.number("drift_amplitude", c.drift_amplitude);
    c.drift_period = problem.number("drift_period", c.drift_period);
    out.gen = std::make_unique<ToyQuadraticGen>(c);
  } else if (name == "constrained_quadratic") {
    ConstrainedQuadraticConfig c;
    c.seed = seed;
    c.dim = static_cast<int>(problem.integer("dim", c.dim));
    c.horizon = horizon_override > 0 ? horizon_override : c.horizon;
    c.constraint_row = problem.number_list("constraint_row", c.constraint_row);
    c.constraint_offset =
        problem.number("constraint_offset", c.constraint_offset);
    auto gen = std::make_unique<ConstrainedQuadraticGen>(c);
    out.constrained = gen.get();
    out.gen = std::move(gen);
  } else {
    throw ConfigError("unknown generator: " + name);
  }
  problem.finish();
  out.horizon = horizon_override > 0 ? horizon_override
                                     : out.gen->horizon();
  if (out.horizon < 1) throw ConfigError("problem.horizon must be >= 1");
  return out;
}

GradientNoiseModel build_noise(const ConfigFile& cfg) {
  bool present = false;
  for (const auto& e : cfg.entries)
    if (e.section == "noise") present = true;
  if (!present) return GradientNoiseModel::none();

  SectionReader noise(cfg, "noise");
  std::string kind = noise.get("kind", "none");
  std::uint64_t seed = static_cast<std::uint64_t>(noise.integer("seed", 0));
  GradientNoiseModel model;
  if (kind == "none") {
    model = GradientNoiseModel::none();
  } else if (kind == "bounded") {
    Vector dir;
    auto coords = noise.number_list("direction", {});
    if (!coords.empty())
      dir = Eigen::Map<const Vector>(coords.data(),
                                     static_cast<long>(coords.size()));
    model = GradientNoiseModel::bounded(noise.require_number("radius"), seed,
                                        std::move(dir));
  } else if (kind == "gaussian") {
    model = GradientNoiseModel::gaussian(
        noise.require_number("stddev"),
        noise.number("clip", std::numeric_limits<double>::infinity()), seed);
  } else if (kind == "measurement") {
    model.kind = GradientNoiseModel::Kind::Measurement;
    model.seed = seed;
  } else {
    throw ConfigError("unknown noise kind: " + kind);
  }
  noise.finish();
  return model;
}

struct SolverSpec {
  std::string label;
  std::string method;
  double alpha = -1.0;  // < 0: auto (1 / sup L_t)
  int steps_per_slice = 1;
  double r = 0.1;
  solvers::DualRule dual_rule = solvers::DualRule::GradientAscent;
  double beta = 0.9;
  bool restart_on_slice = false;
};

std::vector<SolverSpec> build_solvers(const ConfigFile& cfg) {
  std::vector<SolverSpec> specs;
  for (const auto& section : cfg.sections()) {
    if (section != "solver" && section.rfind("solver:", 0) != 0) continue;
    SectionReader reader(cfg, section);
    SolverSpec spec;
    spec.label = section == "solver" ? "solver" : section.substr(7);
    if (spec.label.empty()) throw ConfigError("empty solver label");
    spec.method = reader.require("method");
    std::string alpha = reader.get("alpha", "auto");
    spec.alpha = alpha == "auto" ? -1.0 : parse_number(section + ".alpha", alpha);
    spec.steps_per_slice =
        static_cast<int>(reader.integer("steps_per_slice", 1));
    spec.r = reader.number("r", 0.1);
    std::string rule = reader.get("dual_rule", "gradient_ascent");
    if (rule == "gradient_ascent")
      spec.dual_rule = solvers::DualRule::GradientAscent;
    else if (rule == "as_printed")
      spec.dual_rule = solvers::DualRule::AsPrinted;
    else
      throw ConfigError("unknown dual_rule: " + rule);
    spec.beta = reader.number("beta", 0.9);
    spec.restart_on_slice = reader.flag("restart_on_slice", false);
    reader.finish();
    specs.push_back(std::move(spec));
  }
  if (specs.empty()) throw ConfigError("config needs at least one [solver] section");
  return specs;
}

struct MetricsSpec {
  std::vector<std::string> series;
  std::vector<std::string> certificates;
  double tolerance = 1e-8;
  double plateau_tolerance = 1e-6;
  long burn_in = 5;
  double oracle_tol = -1.0;  // auto: tolerance * 1e-4
  std::string comparator = "mean";

  bool wants(const std::string& name) const {
    return std::find(series.begin(), series.end(), name) != series.end();
  }
  bool has_certificate(const std::string& name) const {
    return std::find(certificates.begin(), certificates.end(), name) !=
           certificates.end();
  }
  double resolved_oracle_tol() const {
    return oracle_tol > 0.0 ? oracle_tol : tolerance * 1e-4;
  }
  bool needs_oracle() const {
    return wants("tracking") || wants("regret") || wants("path_length") ||
           wants("growth_ratio") || wants("objective_gap") ||
           !certificates.empty();
  }
};

MetricsSpec build_metrics(const ConfigFile& cfg) {
  MetricsSpec spec;
  spec.series = {"tracking", "regret",        "path_length",
                 "gradient_error", "objective", "objective_gap"};
  bool present = false;
  for (const auto& e : cfg.entries)
    if (e.section == "metrics") present = true;
  if (!present) return spec;

  SectionReader reader(cfg, "metrics");
  spec.series = reader.string_list("series", spec.series);
  spec.certificates = reader.string_list("certificates", {});
  spec.tolerance = reader.number("tolerance", spec.tolerance);
  spec.plateau_tolerance =
      reader.number("plateau_tolerance", spec.plateau_tolerance);
  spec.burn_in = reader.integer("burn_in", spec.burn_in);
  spec.oracle_tol = reader.number("oracle_tol", spec.oracle_tol);
  spec.comparator = reader.get("comparator", spec.comparator);
  reader.finish();
  for (const auto& c : spec.certificates)
    if (c != "contraction" && c != "regret_bound" && c != "primal_dual")
      throw ConfigError("unknown certificate: " + c);
  if (spec.comparator != "mean" && spec.comparator != "zero")
    throw ConfigError("unknown comparator: " + spec.comparator);
  return spec;
}

// ------------------------------ file helpers -------------------------------

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_trace_csv(const fs::path& path, const IterateTrace& trace) {
  std::ostringstream out;
  if (trace.records.empty()) throw std::runtime_error("empty trace");
  const long n = trace.records.front().x.size();
  const long m =
      trace.records.front().lambda ? trace.records.front().lambda->size() : 0;
  out << "t,f,e";
  for (long i = 0; i < n; ++i) out << ",x" << i;
  for (long i = 0; i < n; ++i) out << ",v" << i;
  for (long i = 0; i < m; ++i) out << ",lambda" << i;
  out << '\n';
  for (const auto& rec : trace.records) {
    out << rec.t << ',' << format_g17(rec.f_value) << ','
        << format_g17(rec.e_true);
    for (long i = 0; i < n; ++i) out << ',' << format_g17(rec.x[i]);
    for (long i = 0; i < n; ++i)
      out << ',' << format_g17(rec.v.size() == n ? rec.v[i] : 0.0);
    for (long i = 0; i < m; ++i) out << ',' << format_g17((*rec.lambda)[i]);
    out << '\n';
  }
  write_text_file(path, out.str());
}

void append_metric_rows(std::ostringstream& out, const std::string& name,
                        const std::vector<double>& values, long t0 = 0) {
  for (std::size_t i = 0; i < values.size(); ++i)
    out << name << ',' << (t0 + static_cast<long>(i)) << ','
        << format_g17(values[i]) << '\n';
}

void write_manifest(const fs::path& dir, const ConfigFile& resolved,
                    std::vector<fs::path> files) {
  write_text_file(dir / "config_resolved.ini", resolved.serialize());
  files.push_back(dir / "config_resolved.ini");
  std::sort(files.begin(), files.end());
  std::ostringstream out;
  out << "toolkit_version = " << kToolkitVersion << '\n';
  out << "config = config_resolved.ini\n";
  char buf[32];
  for (const auto& f : files) {
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64_file(f.string())));
    out << f.filename().string() << " = " << buf << '\n';
  }
  fs::path tmp = dir / "manifest.txt.tmp";
  write_text_file(tmp, out.str());
  fs::rename(tmp, dir / "manifest.txt");
}

// ------------------------------- generic runs ------------------------------

struct SolverRuntime {
  SolverSpec spec;
  double alpha = 0.0;
  std::optional<solvers::ProxGradState> prox_grad;
  std::optional<solvers::PrimalDualState> primal_dual;
  std::optional<solvers::StaticMethodState> static_state;
  solvers::StaticMethodConfig static_cfg;
  Rng noise_rng{0};
  IterateTrace trace;
  std::vector<std::pair<Vector, Vector>> saddle_oracle;
  std::map<std::string, metrics::MetricSeries> series;
  std::vector<metrics::BoundReport> bounds;
};

bool is_static_method(const std::string& method) {
  return method == "gradient_descent" || method == "nesterov_v1" ||
         method == "nesterov_v2" || method == "heavy_ball" ||
         method == "nonlinear_cg";
}

TraceRecord initial_record(const ProblemSlice& slice, const Vector& x0,
                           bool with_lambda, int m) {
  TraceRecord rec;
  rec.t = slice.t;
  rec.x = x0;
  rec.f_value = slice.objective(x0);
  rec.v = Vector::Zero(x0.size());
  if (with_lambda) rec.lambda = Vector::Zero(m);
  return rec;
}

RunResult run_generic(const ConfigFile& cfg, const fs::path& outdir) {
  GeneratorBundle bundle = build_generator(cfg);
  GradientNoiseModel noise = build_noise(cfg);
  std::vector<SolverSpec> specs = build_solvers(cfg);
  MetricsSpec mspec = build_metrics(cfg);
  SectionReader output(cfg, "output");
  output.get("directory", "");
  std::string prefix = output.get("prefix", "");
  output.finish();
  if (!prefix.empty()) prefix += "_";

  const int n = bundle.gen->dimension();
  const long horizon = bundle.horizon;

  if (noise.kind == GradientNoiseModel::Kind::Measurement && !bundle.feedback)
    throw ConfigError(
        "measurement noise requires the network_feedback generator");

  // Pass 1: curvature range across the horizon.
  double mu_inf = std::numeric_limits<double>::infinity();
  double lip_sup = 0.0;
  for (long t = 0; t < horizon; ++t) {
    ProblemSlice s = bundle.gen->slice_at(t);
    mu_inf = std::min(mu_inf, s.smooth.mu);
    lip_sup = std::max(lip_sup, s.smooth.lip);
  }
  if (lip_sup <= 0.0) throw ConfigError("problem has no positive smoothness bound");

  std::vector<SolverRuntime> runtimes;
  for (const auto& spec : specs) {
    SolverRuntime rt;
    rt.spec = spec;
    rt.alpha = spec.alpha > 0.0 ? spec.alpha : 1.0 / lip_sup;
    rt.noise_rng.seed(noise.seed);
    Vector x0 = Vector::Zero(n);
    if (spec.method == "prox_gradient") {
      rt.prox_grad = solvers::ProxGradState{x0, rt.alpha, spec.steps_per_slice};
    } else if (spec.method == "primal_dual") {
      ProblemSlice probe = bundle.gen->slice_at(0);
      if (!probe.constraints)
        throw ConfigError("primal_dual solver requires a constrained problem");
      rt.primal_dual = solvers::PrimalDualState{
          x0, Vector::Zero(probe.constraints->count), rt.alpha, spec.r,
          spec.dual_rule};
    } else if (is_static_method(spec.method)) {
      rt.static_cfg.method = solvers::static_method_from_name(spec.method);
      rt.static_cfg.alpha = rt.alpha;
      rt.static_cfg.beta = spec.beta;
      rt.static_cfg.restart_on_slice = spec.restart_on_slice;
      rt.static_state = solvers::StaticMethodState::init(x0);
    } else {
      throw ConfigError("unknown method: " + spec.method);
    }
    if (mspec.has_certificate("primal_dual")) {
      if (spec.method == "primal_dual" && !bundle.constrained)
        throw ConfigError(
            "primal_dual certificate needs the constrained_quadratic generator");
    }
    runtimes.push_back(std::move(rt));
  }

  const double oracle_tol = mspec.resolved_oracle_tol();
  metrics::OracleSequence oracle;
  const bool needs_oracle = mspec.needs_oracle();

  TimeGrid grid{1.0, horizon, 0};
  while (auto slice_opt = advance(*bundle.gen, grid)) {
    const ProblemSlice& slice = *slice_opt;
    const long t = slice.t;
    if (needs_oracle) {
      if (bundle.constrained) {
        oracle.push_back(
            solvers::batch_solve(bundle.constrained->oracle_slice_at(t), oracle_tol));
      } else {
        oracle.push_back(solvers::batch_solve(slice, oracle_tol));
      }
    }
    for (auto& rt : runtimes) {
      if (t == 0) {
        Vector x0 = Vector::Zero(n);
        rt.trace.records.push_back(initial_record(
            slice, x0, rt.primal_dual.has_value(),
            slice.constraints ? slice.constraints->count : 0));
      } else if (rt.prox_grad) {
        if (noise.kind == GradientNoiseModel::Kind::Measurement) {
          auto& state = *rt.prox_grad;
          TraceRecord rec;
          rec.t = t;
          for (int k = 0; k < state.steps_per_slice; ++k) {
            auto [v, e] = problems::network_feedback_gradient(
                *bundle.feedback, t, state.x, rt.noise_rng);
            if (k == 0) {
              rec.v = v;
              rec.e_true = e;
            }
            state.x = prox(slice.reg, slice.set, state.alpha,
                           state.x - state.alpha * v);
          }
          rec.x = state.x;
          rec.f_value = slice.objective(state.x);
          rt.trace.records.push_back(std::move(rec));
        } else {
          rt.trace.records.push_back(
              solvers::prox_grad_step(*rt.prox_grad, slice, noise, rt.noise_rng));
        }
      } else if (rt.primal_dual) {
        rt.trace.records.push_back(solvers::primal_dual_step(
            *rt.primal_dual, slice, noise, rt.noise_rng));
      } else {
        TraceRecord rec;
        rec.t = t;
        rec.v = slice.smooth.grad(rt.static_state->x);
        solvers::static_method_step(rt.static_cfg, slice, *rt.static_state);
        rec.x = rt.static_state->x;
        rec.f_value = slice.objective(rec.x);
        rt.trace.records.push_back(std::move(rec));
      }
      if (rt.primal_dual && mspec.has_certificate("primal_dual")) {
        double lip_pd = bundle.constrained->pd_lipschitz(rt.spec.r);
        double mu_low = std::min(mu_inf, rt.spec.r);
        double alpha_saddle = mu_low / (lip_pd * lip_pd);
        rt.saddle_oracle.push_back(solvers::batch_saddle_solve(
            slice, rt.spec.r, alpha_saddle, oracle_tol));
      }
    }
  }

  // Metrics and certificates.
  for (auto& rt : runtimes) {
    auto [e_series, e2_series] = metrics::gradient_error_accumulators(rt.trace);
    if (mspec.wants("gradient_error")) {
      rt.series["gradient_error"] = e_series;
      rt.series["gradient_error_sq"] = e2_series;
    }
    std::vector<double> fvals;
    for (const auto& rec : rt.trace.records) fvals.push_back(rec.f_value);
    if (mspec.wants("objective"))
      rt.series["objective"] =
          metrics::MetricSeries::from_values("objective", fvals);
    if (needs_oracle) {
      if (mspec.wants("tracking"))
        rt.series["tracking_error"] = metrics::tracking_error(rt.trace, oracle);
      metrics::MetricSeries regret = metrics::dynamic_regret(rt.trace, oracle);
      if (mspec.wants("regret")) rt.series["regret"] = regret;
      if (mspec.wants("objective_gap")) {
        std::vector<double> gap(fvals.size());
        for (std::size_t i = 0; i < gap.size(); ++i)
          gap[i] = fvals[i] - oracle[i].f_star;
        rt.series["objective_gap"] =
            metrics::MetricSeries::from_values("objective_gap", gap);
      }
      if (mspec.wants("growth_ratio")) {
        metrics::MetricSeries sigma = metrics::path_length(oracle);
        rt.series["growth_ratio"] =
            metrics::regret_growth_ratio(regret, e_series, sigma);
      }
      if (mspec.has_certificate("contraction")) {
        metrics::ContractionParams p;
        p.alpha = rt.alpha;
        p.mu = mu_inf;
        p.lip = lip_sup;
        p.tolerance = mspec.tolerance;
        p.plateau_tolerance = mspec.plateau_tolerance;
        p.burn_in = mspec.burn_in;
        rt.bounds.push_back(metrics::contraction_certificate(rt.trace, oracle, p));
      }
      if (mspec.has_certificate("regret_bound")) {
        metrics::RegretBoundParams p;
        p.lip = lip_sup;
        p.alpha_used = rt.alpha;
        p.tolerance = mspec.tolerance;
        if (mspec.comparator == "zero") {
          p.comparator = metrics::ComparatorMode::Fixed;
          p.fixed_comparator = Vector::Zero(n);
        }
        rt.bounds.push_back(metrics::regret_bound_check(rt.trace, oracle, p));
      }
    }
    if (rt.primal_dual && mspec.has_certificate("primal_dual")) {
      metrics::PrimalDualParams p;
      p.alpha = rt.alpha;
      p.mu = mu_inf;
      p.r = rt.spec.r;
      p.lip_pd = bundle.constrained->pd_lipschitz(rt.spec.r);
      p.tolerance = mspec.tolerance;
      p.plateau_tolerance = mspec.plateau_tolerance;
      p.burn_in = mspec.burn_in;
      rt.bounds.push_back(
          metrics::primal_dual_certificate(rt.trace, rt.saddle_oracle, p));
    }
  }

  // Outputs.
  fs::create_directories(outdir);
  std::vector<fs::path> files;
  const bool single = runtimes.size() == 1 && runtimes[0].spec.label == "solver";
  for (const auto& rt : runtimes) {
    fs::path tf = outdir / (single ? prefix + "trace.csv"
                                   : prefix + "trace_" + rt.spec.label + ".csv");
    write_trace_csv(tf, rt.trace);
    files.push_back(tf);
  }

  std::ostringstream mout;
  mout << "metric,t,value\n";
  if (needs_oracle) {
    if (mspec.wants("path_length")) {
      metrics::MetricSeries sigma = metrics::path_length(oracle);
      append_metric_rows(mout, "path_length", sigma.values);
      append_metric_rows(mout, "path_length_cum", sigma.cumulative);
    }
    std::vector<double> fstar;
    for (const auto& o : oracle) fstar.push_back(o.f_star);
    append_metric_rows(mout, "optimal_value", fstar);
  }
  for (const auto& rt : runtimes) {
    std::string p = single ? "" : rt.spec.label + ".";
    for (const auto& [name, series] : rt.series) {
      append_metric_rows(mout, p + name, series.values);
      if (name == "regret" || name == "gradient_error" ||
          name == "gradient_error_sq")
        append_metric_rows(mout, p + name + "_cum", series.cumulative);
    }
  }
  fs::path mf = outdir / (prefix + "metrics.csv");
  write_text_file(mf, mout.str());
  files.push_back(mf);

  bool any_bounds = false;
  for (const auto& rt : runtimes) any_bounds |= !rt.bounds.empty();
  if (any_bounds) {
    std::ostringstream bout, sout;
    bout << "bound,t,lhs,rhs,violated\n";
    for (const auto& rt : runtimes) {
      std::string p = single ? "" : rt.spec.label + ".";
      for (const auto& report : rt.bounds) {
        for (std::size_t i = 0; i < report.lhs.size(); ++i) {
          bout << p + report.name << ',' << report.steps[i] << ','
               << format_g17(report.lhs[i]) << ',' << format_g17(report.rhs[i])
               << ','
               << (report.lhs[i] > report.rhs[i] + report.tolerance ? 1 : 0)
               << '\n';
        }
        sout << p + report.name << ":\n" << report.summary() << '\n';
      }
    }
    fs::path bf = outdir / (prefix + "bounds.csv");
    write_text_file(bf, bout.str());
    files.push_back(bf);
    fs::path sf = outdir / (prefix + "bounds_summary.txt");
    write_text_file(sf, sout.str());
    files.push_back(sf);
  }

  write_manifest(outdir, cfg, files);

  RunResult result;
  result.directory = outdir;
  for (auto& rt : runtimes) {
    SolverOutcome outcome;
    outcome.label = rt.spec.label;
    outcome.trace = std::move(rt.trace);
    outcome.series = std::move(rt.series);
    outcome.bounds = std::move(rt.bounds);
    result.solvers.push_back(std::move(outcome));
  }
  const auto& first = result.solvers.front();
  if (auto it = first.series.find("tracking_error"); it != first.series.end())
    result.final_tracking_error = it->second.values.back();
  if (auto it = first.series.find("regret"); it != first.series.end())
    result.final_regret = it->second.cumulative.back();
  for (const auto& s : result.solvers)
    for (const auto& b : s.bounds) {
      result.bound_violations += b.violation_count;
      if (b.has_plateau_check && !b.plateau_ok) result.bound_violations += 1;
    }
  return result;
}

// ----------------------------- fig1 experiment -----------------------------

struct Fig1Method {
  std::string label;
  solvers::StaticMethodConfig cfg;
};

std::vector<Fig1Method> fig1_methods(double mu_hat, double lip_hat,
                                     double lip_sup) {
  double sl = std::sqrt(lip_hat), sm = std::sqrt(mu_hat);
  double hb_alpha = 4.0 / ((sl + sm) * (sl + sm));
  double hb_beta = ((sl - sm) / (sl + sm)) * ((sl - sm) / (sl + sm));
  using M = solvers::StaticMethod;
  std::vector<Fig1Method> out;
  out.push_back({"gradient_descent", {M::GradientDescent, 1.0 / lip_sup, 0.0, false}});
  out.push_back({"nesterov_v1", {M::NesterovV1, 1.0 / lip_sup, 0.0, false}});
  out.push_back({"nesterov_v2", {M::NesterovV2, 1.0 / lip_sup, 0.0, false}});
  out.push_back({"heavy_ball", {M::HeavyBall, hb_alpha, hb_beta, false}});
  out.push_back({"nonlinear_cg", {M::NonlinearCg, 1.0, 0.0, false}});
  return out;
}

RunResult run_fig1(const ConfigFile& cfg, const fs::path& outdir) {
  SectionReader exp(cfg, "experiment");
  exp.require("kind");
  std::uint64_t seed = static_cast<std::uint64_t>(exp.integer("seed", 1));
  long horizon = exp.integer("horizon", 950);
  long tune_slice = exp.integer("tune_slice", 49);
  long static_slice = exp.integer("static_slice", 100);
  long static_cap = exp.integer("static_cap", 5000000);
  double static_threshold = exp.number("static_threshold", 1e-6);
  double oracle_tol = exp.number("oracle_tol", 1e-10);
  exp.finish();

  problems::TVLeastSquaresConfig gc;
  gc.rows_per_record = 2;
  gc.seed = seed;
  gc.horizon = horizon;
  problems::TVLeastSquaresGen gen(gc);

  double mu_inf = std::numeric_limits<double>::infinity();
  double lip_sup = 0.0;
  for (long t = 0; t < horizon; ++t) {
    ProblemSlice s = gen.slice_at(t);
    mu_inf = std::min(mu_inf, s.smooth.mu);
    lip_sup = std::max(lip_sup, s.smooth.lip);
  }
  ProblemSlice tune = gen.slice_at(std::min(tune_slice, horizon - 1));
  auto methods = fig1_methods(tune.smooth.mu, tune.smooth.lip, lip_sup);

  std::vector<solvers::StaticMethodState> states;
  std::vector<IterateTrace> traces(methods.size() + 1);
  for (std::size_t m = 0; m < methods.size(); ++m)
    states.push_back(solvers::StaticMethodState::init(Vector::Zero(gc.dim)));

  metrics::OracleSequence oracle;
  TimeGrid grid{1.0, horizon, 0};
  while (auto slice_opt = advance(gen, grid)) {
    const ProblemSlice& slice = *slice_opt;
    const long t = slice.t;
    oracle.push_back(solvers::batch_solve(slice, oracle_tol));
    for (std::size_t m = 0; m < methods.size(); ++m) {
      if (t == 0) {
        traces[m].records.push_back(
            initial_record(slice, states[m].x, false, 0));
        continue;
      }
      TraceRecord rec;
      rec.t = t;
      rec.v = slice.smooth.grad(states[m].x);
      solvers::static_method_step(methods[m].cfg, slice, states[m]);
      rec.x = states[m].x;
      rec.f_value = slice.objective(rec.x);
      traces[m].records.push_back(std::move(rec));
    }
    TraceRecord oracle_rec;  // the batch baseline replays the per-step optimum
    oracle_rec.t = t;
    oracle_rec.x = oracle.back().x_star;
    oracle_rec.f_value = oracle.back().f_star;
    oracle_rec.v = Vector::Zero(gc.dim);
    traces.back().records.push_back(std::move(oracle_rec));
  }

  std::vector<std::string> labels;
  for (const auto& m : methods) labels.push_back(m.label);
  labels.push_back("batch_oracle");

  fs::create_directories(outdir);
  std::vector<fs::path> files;
  for (std::size_t m = 0; m < labels.size(); ++m) {
    fs::path tf = outdir / ("trace_" + labels[m] + ".csv");
    write_trace_csv(tf, traces[m]);
    files.push_back(tf);
  }

  std::ostringstream mout;
  mout << "metric,t,value\n";
  metrics::MetricSeries sigma = metrics::path_length(oracle);
  append_metric_rows(mout, "path_length", sigma.values);
  append_metric_rows(mout, "path_length_cum", sigma.cumulative);
  std::vector<double> fstar;
  for (const auto& o : oracle) fstar.push_back(o.f_star);
  append_metric_rows(mout, "optimal_value", fstar);

  RunResult result;
  for (std::size_t m = 0; m < labels.size(); ++m) {
    SolverOutcome outcome;
    outcome.label = labels[m];
    outcome.series["tracking_error"] =
        metrics::tracking_error(traces[m], oracle);
    std::vector<double> gap(traces[m].size());
    for (std::size_t i = 0; i < gap.size(); ++i)
      gap[i] = traces[m][i].f_value - oracle[i].f_star;
    outcome.series["objective_gap"] =
        metrics::MetricSeries::from_values("objective_gap", gap);
    append_metric_rows(mout, labels[m] + ".tracking_error",
                       outcome.series["tracking_error"].values);
    append_metric_rows(mout, labels[m] + ".objective_gap", gap);
    outcome.trace = std::move(traces[m]);
    result.solvers.push_back(std::move(outcome));
  }
  fs::path mf = outdir / "metrics.csv";
  write_text_file(mf, mout.str());
  files.push_back(mf);

  // Batch phase on one frozen slice: iterations to reach the value threshold.
  ProblemSlice frozen = gen.slice_at(std::min(static_slice, horizon - 1));
  double frozen_fstar = solvers::batch_solve(frozen, 1e-12).f_star;
  auto static_methods = fig1_methods(frozen.smooth.mu, frozen.smooth.lip,
                                     frozen.smooth.lip);
  std::ostringstream sum;
  sum << "method,iterations_to_threshold,final_gap\n";
  for (const auto& method : static_methods) {
    solvers::StaticMethodState st =
        solvers::StaticMethodState::init(Vector::Zero(gc.dim));
    std::vector<double> gaps;
    long reached = -1;
    for (long k = 1; k <= static_cap; ++k) {
      solvers::static_method_step(method.cfg, frozen, st);
      double gap = frozen.objective(st.x) - frozen_fstar;
      gaps.push_back(gap);
      if (gap <= static_threshold) {
        reached = k;
        break;
      }
    }
    long stride = std::max<long>(1, static_cast<long>(gaps.size()) / 20000);
    std::ostringstream gout;
    gout << "k,gap\n";
    for (std::size_t i = 0; i < gaps.size(); ++i)
      if (i % stride == 0 || i + 1 == gaps.size())
        gout << (i + 1) << ',' << format_g17(gaps[i]) << '\n';
    fs::path gf = outdir / ("staticgap_" + method.label + ".csv");
    write_text_file(gf, gout.str());
    files.push_back(gf);
    sum << method.label << ',' << reached << ',' << format_g17(gaps.back())
        << '\n';
  }
  fs::path sf = outdir / "static_summary.csv";
  write_text_file(sf, sum.str());
  files.push_back(sf);

  write_manifest(outdir, cfg, files);
  result.directory = outdir;
  result.final_tracking_error =
      result.solvers.front().series.at("tracking_error").values.back();
  return result;
}

// ----------------------------- fig6 experiment -----------------------------

RunResult run_fig6(const ConfigFile& cfg, const fs::path& outdir) {
  SectionReader exp(cfg, "experiment");
  exp.require("kind");
  dist::Fig6Config fc;
  fc.nodes = static_cast<int>(exp.integer("nodes", fc.nodes));
  fc.horizon = exp.integer("horizon", fc.horizon);
  fc.edge_probability = exp.number("edge_probability", fc.edge_probability);
  fc.graph_seed = static_cast<std::uint64_t>(
      exp.integer("graph_seed", static_cast<long>(fc.graph_seed)));
  fc.cost_seed = static_cast<std::uint64_t>(
      exp.integer("seed", static_cast<long>(fc.cost_seed)));
  fc.async_seed = static_cast<std::uint64_t>(
      exp.integer("async_seed", static_cast<long>(fc.async_seed)));
  fc.max_delay = static_cast<int>(exp.integer("max_delay", fc.max_delay));
  fc.graph_file = exp.get("graph_file", "");
  fc.dgd_alpha0 = exp.number("dgd_alpha0", fc.dgd_alpha0);
  fc.dgd_constant_alpha =
      exp.number("dgd_constant_alpha", fc.dgd_constant_alpha);
  fc.extra_alpha = exp.number("extra_alpha", fc.extra_alpha);
  fc.dual_decomp_alpha = exp.number("dual_decomp_alpha", fc.dual_decomp_alpha);
  fc.admm_rho = exp.number("admm_rho", fc.admm_rho);
  fc.oracle_tol = exp.number("oracle_tol", fc.oracle_tol);
  exp.finish();

  auto series = dist::run_fig6_experiment(fc);
  fs::create_directories(outdir);
  std::ostringstream out;
  dist::write_fig6_csv(series, out);
  fs::path ff = outdir / "fig6.csv";
  write_text_file(ff, out.str());
  write_manifest(outdir, cfg, {ff});

  RunResult result;
  result.directory = outdir;
  return result;
}

}  // namespace

// ------------------------------- public API --------------------------------

RunResult run_experiment(const ConfigFile& cfg, const fs::path& outdir) {
  SectionReader top(cfg, "");
  long version = parse_integer("version", top.require("version"));
  if (version != 1)
    throw ConfigError("unsupported config version: " + std::to_string(version));
  top.finish();

  bool has_experiment = false;
  for (const auto& e : cfg.entries)
    if (e.section == "experiment") has_experiment = true;
  if (has_experiment) {
    SectionReader exp(cfg, "experiment");
    std::string kind = exp.require("kind");
    if (kind == "fig1") return run_fig1(cfg, outdir);
    if (kind == "fig6") return run_fig6(cfg, outdir);
    throw ConfigError("unknown experiment kind: " + kind);
  }
  return run_generic(cfg, outdir);
}

std::vector<std::string> preset_names() {
  return {"fig1", "fig6", "rpca", "ssc", "feedback"};
}

ConfigFile preset_config(const std::string& name) {
  std::string text;
  if (name == "fig1") {
    text =
        "version = 1\n"
        "[experiment]\n"
        "kind = fig1\n"
        "seed = 1\n"
        "horizon = 950\n";
  } else if (name == "fig6") {
    text =
        "version = 1\n"
        "[experiment]\n"
        "kind = fig6\n"
        "seed = 7\n"
        "graph_seed = 3\n"
        "async_seed = 11\n"
        "horizon = 800\n";
  } else if (name == "rpca") {
    text =
        "version = 1\n"
        "[problem]\n"
        "generator = rpca_stream\n"
        "seed = 5\n"
        "horizon = 30\n"
        "[solver:k2]\n"
        "method = prox_gradient\n"
        "alpha = 0.1\n"
        "steps_per_slice = 2\n"
        "[solver:k10]\n"
        "method = prox_gradient\n"
        "alpha = 0.1\n"
        "steps_per_slice = 10\n"
        "[metrics]\n"
        "series = objective\n"
        "[output]\n"
        "directory = rpca\n";
  } else if (name == "ssc") {
    text =
        "version = 1\n"
        "[problem]\n"
        "generator = ssc_stream\n"
        "seed = 3\n"
        "horizon = 200\n"
        "points = 16\n"
        "lambda = 0.2\n"
        "refresh_every = 10\n"
        "[solver]\n"
        "method = prox_gradient\n"
        "alpha = auto\n"
        "steps_per_slice = 20\n"
        "[metrics]\n"
        "series = objective\n"
        "[output]\n"
        "directory = ssc\n";
  } else if (name == "feedback") {
    text =
        "version = 1\n"
        "[problem]\n"
        "generator = network_feedback\n"
        "seed = 13\n"
        "horizon = 400\n"
        "[noise]\n"
        "kind = measurement\n"
        "seed = 21\n"
        "[solver]\n"
        "method = prox_gradient\n"
        "alpha = auto\n"
        "[metrics]\n"
        "series = tracking, regret, path_length, gradient_error, objective, "
        "objective_gap\n"
        "certificates = contraction\n"
        "[output]\n"
        "directory = feedback\n";
  } else {
    throw ConfigError("unknown preset: " + name);
  }
  return ConfigFile::parse(text);
}

void override_seeds(ConfigFile& cfg, std::uint64_t seed) {
  bool has_problem = false, has_experiment = false, has_noise = false;
  for (const auto& e : cfg.entries) {
    if (e.section == "problem") has_problem = true;
    if (e.section == "experiment") has_experiment = true;
    if (e.section == "noise") has_noise = true;
  }
  if (has_problem) cfg.set("problem", "seed", std::to_string(seed));
  if (has_experiment) cfg.set("experiment", "seed", std::to_string(seed));
  if (has_noise) cfg.set("noise", "seed", std::to_string(seed + 1000003));
}

SweepResult run_sweep(
    const ConfigFile& base,
    const std::vector<std::pair<std::string, std::vector<std::string>>>& grid,
    const fs::path& outdir) {
  if (grid.empty()) throw ConfigError("sweep: empty parameter grid");
  for (const auto& [path, values] : grid)
    if (values.empty())
      throw ConfigError("sweep: no values for grid key " + path);

  long total = 1;
  for (const auto& [path, values] : grid)
    total *= static_cast<long>(values.size());

  fs::create_directories(outdir);
  std::ostringstream sum;
  sum << "run";
  for (const auto& [path, values] : grid) sum << ',' << path;
  sum << ",status,final_tracking_error,final_regret,violations\n";

  SweepResult result;
  result.directory = outdir;
  result.total = static_cast<int>(total);
  for (long run = 0; run < total; ++run) {
    ConfigFile cfg = base;
    long rest = run;
    std::vector<std::string> chosen;
    for (const auto& [path, values] : grid) {
      std::size_t idx = static_cast<std::size_t>(rest % values.size());
      rest /= static_cast<long>(values.size());
      auto dot = path.find('.');
      std::string section = dot == std::string::npos ? "" : path.substr(0, dot);
      std::string key = dot == std::string::npos ? path : path.substr(dot + 1);
      cfg.set(section, key, values[idx]);
      chosen.push_back(values[idx]);
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "run_%03ld", run);
    fs::path rundir = outdir / buf;
    sum << buf;
    for (const auto& v : chosen) sum << ',' << v;
    try {
      RunResult rr = run_experiment(cfg, rundir);
      sum << ",ok," << format_g17(rr.final_tracking_error) << ','
          << format_g17(rr.final_regret) << ',' << rr.bound_violations << '\n';
    } catch (const std::exception& err) {
      ++result.failed;
      fs::create_directories(rundir);
      write_text_file(rundir / "error.txt", std::string(err.what()) + "\n");
      sum << ",failed,nan,nan,-1\n";
    }
  }
  write_text_file(outdir / "summary.csv", sum.str());
  return result;
}

namespace {

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> row;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<fs::path> write_report(const fs::path& rundir) {
  if (!fs::exists(rundir))
    throw std::runtime_error("run directory does not exist: " + rundir.string());
  std::vector<fs::path> produced;

  fs::path fig6 = rundir / "fig6.csv";
  if (fs::exists(fig6)) {
    auto rows = read_csv(fig6);
    std::map<std::string, std::ostringstream> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto& r = rows[i];
      if (r.size() != 4) continue;
      std::string key = r[0] + "_" + r[1];
      auto [it, inserted] = out.try_emplace(key);
      if (inserted) it->second << "# t avg_tracking_error\n";
      it->second << r[2] << ' ' << r[3] << '\n';
    }
    for (auto& [key, text] : out) {
      fs::path f = rundir / ("fig6_" + key + ".dat");
      write_text_file(f, text.str());
      produced.push_back(f);
    }
  }

  fs::path metrics_file = rundir / "metrics.csv";
  if (fs::exists(metrics_file)) {
    auto rows = read_csv(metrics_file);
    std::map<std::string, std::ostringstream> out;
    const std::string suffix = "objective_gap";
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto& r = rows[i];
      if (r.size() != 3) continue;
      const std::string& metric = r[0];
      if (metric.size() < suffix.size() ||
          metric.compare(metric.size() - suffix.size(), suffix.size(), suffix) != 0)
        continue;
      std::string label = metric == suffix
                              ? "solver"
                              : metric.substr(0, metric.size() - suffix.size() - 1);
      auto [it, inserted] = out.try_emplace(label);
      if (inserted)
        it->second << "# t |f_t(x_t) - f_t*|  (log scale recommended)\n";
      it->second << r[1] << ' '
                 << format_g17(std::abs(parse_number("value", r[2]))) << '\n';
    }
    for (auto& [label, text] : out) {
      fs::path f = rundir / ("fig1_" + label + ".dat");
      write_text_file(f, text.str());
      produced.push_back(f);
    }
    if (out.empty()) {
      // Runs without per-step optima still get plain objective series.
      std::map<std::string, std::ostringstream> plain;
      for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != 3) continue;
        const std::string& metric = r[0];
        std::string label;
        if (metric == "objective")
          label = "solver";
        else if (metric.size() > 10 &&
                 metric.compare(metric.size() - 10, 10, ".objective") == 0)
          label = metric.substr(0, metric.size() - 10);
        else
          continue;
        auto [it, inserted] = plain.try_emplace(label);
        if (inserted) it->second << "# t f_t(x_t)\n";
        it->second << r[1] << ' ' << r[2] << '\n';
      }
      for (auto& [label, text] : plain) {
        fs::path f = rundir / ("series_" + label + "_objective.dat");
        write_text_file(f, text.str());
        produced.push_back(f);
      }
    }
  }

  for (const auto& entry : fs::directory_iterator(rundir)) {
    std::string name = entry.path().filename().string();
    if (name.rfind("staticgap_", 0) != 0 || entry.path().extension() != ".csv")
      continue;
    auto rows = read_csv(entry.path());
    std::ostringstream text;
    text << "# k |f(x_k) - f*|  (log scale recommended)\n";
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (rows[i].size() == 2) text << rows[i][0] << ' ' << rows[i][1] << '\n';
    std::string label = name.substr(10, name.size() - 14);
    fs::path f = rundir / ("fig1_static_" + label + ".dat");
    write_text_file(f, text.str());
    produced.push_back(f);
  }

  if (produced.empty())
    throw std::runtime_error("no reportable outputs in " + rundir.string());
  return produced;
}

fs::path resolve_out_dir(const std::string& out) {
  const char* root = std::getenv(kOutputRootEnv);
  fs::path p = out.empty() ? fs::path("tvopt_runs") : fs::path(out);
  if (p.is_relative() && root && *root) return fs::path(root) / p;
  return p;
}

}  // namespace tvopt::cli
