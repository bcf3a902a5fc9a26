#include "tvopt/distributed.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <queue>
#include <sstream>

#include "tvopt/solvers.hpp"

namespace tvopt::dist {

void Graph::validate() const {
  if (nodes < 1) throw ConfigError("graph: need at least one node");
  for (auto [i, j] : edges) {
    if (i < 0 || j < 0 || i >= nodes || j >= nodes)
      throw ConfigError("graph: edge endpoint out of range");
    if (i == j) throw ConfigError("graph: self loops are not allowed");
  }
  if (!connected()) throw ConfigError("graph: not connected");
}

bool Graph::connected() const {
  if (nodes <= 1) return true;
  std::vector<std::vector<int>> adj(nodes);
  for (auto [i, j] : edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  std::vector<char> seen(nodes, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        q.push(v);
      }
    }
  }
  return count == nodes;
}

std::vector<int> Graph::degrees() const {
  std::vector<int> deg(nodes, 0);
  for (auto [i, j] : edges) {
    ++deg[i];
    ++deg[j];
  }
  return deg;
}

Graph Graph::from_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open edge list file: " + path);
  Graph g;
  std::string line;
  int max_node = -1;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    int i, j;
    if (!(ls >> i >> j)) continue;
    g.edges.emplace_back(i, j);
    max_node = std::max({max_node, i, j});
  }
  g.nodes = max_node + 1;
  g.validate();
  return g;
}

Graph random_connected_graph(int nodes, double edge_probability,
                             std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x6e0d));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::vector<char>> present(nodes, std::vector<char>(nodes, 0));
  Graph g;
  g.nodes = nodes;
  // Random attachment tree guarantees connectivity.
  for (int v = 1; v < nodes; ++v) {
    int u = static_cast<int>(unif(rng) * v);
    u = std::min(u, v - 1);
    present[u][v] = present[v][u] = 1;
    g.edges.emplace_back(u, v);
  }
  for (int i = 0; i < nodes; ++i) {
    for (int j = i + 1; j < nodes; ++j) {
      if (!present[i][j] && unif(rng) < edge_probability) {
        present[i][j] = 1;
        g.edges.emplace_back(i, j);
      }
    }
  }
  g.validate();
  return g;
}

void MixingMatrix::validate(const Graph& g, double tol) const {
  const long n = w.rows();
  if (n != w.cols() || n != g.nodes)
    throw ConfigError("mixing matrix: size does not match graph");
  if (!w.isApprox(w.transpose(), tol))
    throw ConfigError("mixing matrix: not symmetric");
  if ((w.array() < -tol).any())
    throw ConfigError("mixing matrix: negative weight");
  if (((w.rowwise().sum().array() - 1.0).abs() > 1e-9).any())
    throw ConfigError("mixing matrix: rows must sum to one");
  std::vector<std::vector<char>> allowed(g.nodes, std::vector<char>(g.nodes, 0));
  for (int i = 0; i < g.nodes; ++i) allowed[i][i] = 1;
  for (auto [i, j] : g.edges) allowed[i][j] = allowed[j][i] = 1;
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j)
      if (w(i, j) > tol && !allowed[i][j])
        throw ConfigError("mixing matrix: weight off the graph support");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(w);
  if (eig.eigenvalues().cwiseAbs().maxCoeff() > 1.0 + 1e-9)
    throw ConfigError("mixing matrix: spectral radius exceeds one");
}

MixingMatrix build_metropolis_weights(const Graph& g) {
  g.validate();
  std::vector<int> deg = g.degrees();
  MixingMatrix m;
  m.w = Matrix::Zero(g.nodes, g.nodes);
  for (auto [i, j] : g.edges) {
    double wij = 1.0 / (1.0 + std::max(deg[i], deg[j]));
    m.w(i, j) = wij;
    m.w(j, i) = wij;
  }
  for (int i = 0; i < g.nodes; ++i)
    m.w(i, i) = 1.0 - m.w.row(i).sum();
  m.validate(g);
  return m;
}

LocalCosts consensus_costs(std::shared_ptr<const problems::ConsensusCostGen> gen) {
  LocalCosts c;
  c.nodes = gen->nodes();
  c.dim = 1;
  c.mu = gen->mu();
  c.lip = gen->lip();
  c.eval = [gen](int i, long t, const Vector& x) {
    return gen->local_cost(i, t, x[0]);
  };
  c.grad = [gen](int i, long t, const Vector& x) -> Vector {
    Vector g(1);
    g[0] = gen->local_gradient(i, t, x[0]);
    return g;
  };
  return c;
}

LocalCosts quadratic_costs(std::vector<double> curvature,
                           std::vector<double> center) {
  if (curvature.size() != center.size() || curvature.empty())
    throw ConfigError("quadratic_costs: curvature/center size mismatch");
  auto kappa = std::make_shared<std::vector<double>>(std::move(curvature));
  auto c = std::make_shared<std::vector<double>>(std::move(center));
  LocalCosts costs;
  costs.nodes = static_cast<int>(kappa->size());
  costs.dim = 1;
  costs.mu = *std::min_element(kappa->begin(), kappa->end());
  costs.lip = *std::max_element(kappa->begin(), kappa->end());
  costs.is_quadratic = true;
  costs.eval = [kappa, c](int i, long, const Vector& x) {
    double d = x[0] - (*c)[i];
    return 0.5 * (*kappa)[i] * d * d;
  };
  costs.grad = [kappa, c](int i, long, const Vector& x) -> Vector {
    Vector g(1);
    g[0] = (*kappa)[i] * (x[0] - (*c)[i]);
    return g;
  };
  costs.hessian = [kappa](int i, long) -> Matrix {
    Matrix h(1, 1);
    h(0, 0) = (*kappa)[i];
    return h;
  };
  return costs;
}

long AsyncSamplingModel::sample_time(int node, long t) const {
  if (max_delay <= 0) return t;
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(node),
                      static_cast<std::uint64_t>(t)));
  std::uniform_int_distribution<int> d(0, max_delay);
  return std::max<long>(0, t - d(rng));
}

namespace {

std::vector<Vector> zero_states(int nodes, int dim) {
  return std::vector<Vector>(nodes, Vector::Zero(dim));
}

/// argmin h_i(x) + extra(x), where extra adds a linear term and optionally a
/// proximal quadratic rho/2 sum ||x - anchor_k||^2. Exact for quadratics,
/// otherwise an inner high-accuracy solve.
Vector local_argmin(const LocalCosts& costs, int i, long t, const Vector& linear,
                    double rho, const std::vector<Vector>& anchors,
                    double inner_tol) {
  const int dim = costs.dim;
  const double extra_curv = rho * static_cast<double>(anchors.size());
  auto grad_full = [&](const Vector& x) -> Vector {
    Vector g = costs.grad(i, t, x) + linear;
    for (const auto& a : anchors) g += rho * (x - a);
    return g;
  };

  if (costs.is_quadratic && costs.hessian) {
    Matrix h = costs.hessian(i, t) + extra_curv * Matrix::Identity(dim, dim);
    Vector x0 = Vector::Zero(dim);
    return x0 - Eigen::LDLT<Matrix>(h).solve(grad_full(x0));
  }

  ProblemSlice slice;
  slice.t = t;
  slice.dim = dim;
  slice.smooth.mu = costs.mu + extra_curv;
  slice.smooth.lip = costs.lip + extra_curv;
  slice.smooth.eval = [&, i, t](const Vector& x) {
    double v = costs.eval(i, t, x) + linear.dot(x);
    for (const auto& a : anchors) v += 0.5 * rho * (x - a).squaredNorm();
    return v;
  };
  slice.smooth.grad = grad_full;
  slice.reg = RegularizerSpec::zero();
  slice.set = FeasibleSet::all_space(dim);
  return solvers::batch_solve(slice, inner_tol).x_star;
}

}  // namespace

DgdMethod::DgdMethod(MixingMatrix w, LocalCosts costs, DgdOptions opt,
                     AsyncSamplingModel sampler)
    : w_(std::move(w)),
      costs_(std::move(costs)),
      opt_(opt),
      sampler_(sampler),
      y_(zero_states(costs_.nodes, costs_.dim)) {}

void DgdMethod::step(long t) {
  double alpha = opt_.vanishing && t >= 1
                     ? opt_.alpha0 / static_cast<double>(t)
                     : opt_.alpha0;
  std::vector<Vector> next(costs_.nodes);
  for (int i = 0; i < costs_.nodes; ++i) {
    Vector mix = Vector::Zero(costs_.dim);
    for (int j = 0; j < costs_.nodes; ++j)
      if (w_.w(i, j) != 0.0) mix += w_.w(i, j) * y_[j];
    long ti = sampler_.sample_time(i, t);
    next[i] = mix - alpha * costs_.grad(i, ti, y_[i]);
  }
  y_ = std::move(next);
}

std::vector<Vector> dgd_stacked_step(const std::vector<Vector>& y,
                                     const MixingMatrix& w,
                                     const LocalCosts& costs, long t,
                                     double alpha,
                                     const AsyncSamplingModel& sampler) {
  const int n = costs.nodes;
  const int dim = costs.dim;
  Matrix stacked(n, dim);
  for (int i = 0; i < n; ++i) stacked.row(i) = y[i].transpose();
  Matrix grads(n, dim);
  for (int i = 0; i < n; ++i)
    grads.row(i) = costs.grad(i, sampler.sample_time(i, t), y[i]).transpose();
  Matrix next = w.w * stacked - alpha * grads;
  std::vector<Vector> out(n);
  for (int i = 0; i < n; ++i) out[i] = next.row(i).transpose();
  return out;
}

ExtraMethod::ExtraMethod(MixingMatrix w, LocalCosts costs, double alpha,
                         AsyncSamplingModel sampler)
    : w_(std::move(w)),
      costs_(std::move(costs)),
      alpha_(alpha),
      sampler_(sampler),
      y_(zero_states(costs_.nodes, costs_.dim)),
      y_prev_(y_),
      grad_prev_(costs_.nodes) {
  w_tilde_ = 0.5 * (Matrix::Identity(costs_.nodes, costs_.nodes) + w_.w);
}

void ExtraMethod::step(long t) {
  const int n = costs_.nodes;
  std::vector<Vector> grads(n);
  for (int i = 0; i < n; ++i)
    grads[i] = costs_.grad(i, sampler_.sample_time(i, t), y_[i]);

  std::vector<Vector> next(n);
  if (first_) {
    for (int i = 0; i < n; ++i) {
      Vector mix = Vector::Zero(costs_.dim);
      for (int j = 0; j < n; ++j)
        if (w_.w(i, j) != 0.0) mix += w_.w(i, j) * y_[j];
      next[i] = mix - alpha_ * grads[i];
    }
    first_ = false;
  } else {
    for (int i = 0; i < n; ++i) {
      Vector mix = y_[i];
      for (int j = 0; j < n; ++j) {
        if (w_.w(i, j) != 0.0) mix += w_.w(i, j) * y_[j];
        if (w_tilde_(i, j) != 0.0) mix -= w_tilde_(i, j) * y_prev_[j];
      }
      next[i] = mix - alpha_ * (grads[i] - grad_prev_[i]);
    }
  }
  y_prev_ = y_;
  grad_prev_ = std::move(grads);
  y_ = std::move(next);
}

DualDecompositionMethod::DualDecompositionMethod(Graph g, LocalCosts costs,
                                                 double dual_step,
                                                 AsyncSamplingModel sampler,
                                                 double inner_tol)
    : g_(std::move(g)),
      costs_(std::move(costs)),
      dual_step_(dual_step),
      sampler_(sampler),
      inner_tol_(inner_tol),
      y_(zero_states(costs_.nodes, costs_.dim)),
      edge_dual_(g_.edges.size(), Vector::Zero(costs_.dim)) {}

void DualDecompositionMethod::step(long t) {
  const int n = costs_.nodes;
  std::vector<Vector> linear(n, Vector::Zero(costs_.dim));
  for (std::size_t e = 0; e < g_.edges.size(); ++e) {
    auto [i, j] = g_.edges[e];
    linear[i] += edge_dual_[e];
    linear[j] -= edge_dual_[e];
  }
  for (int i = 0; i < n; ++i) {
    y_[i] = local_argmin(costs_, i, sampler_.sample_time(i, t), linear[i], 0.0,
                         {}, inner_tol_);
  }
  for (std::size_t e = 0; e < g_.edges.size(); ++e) {
    auto [i, j] = g_.edges[e];
    edge_dual_[e] += dual_step_ * (y_[i] - y_[j]);
  }
}

AdmmMethod::AdmmMethod(Graph g, LocalCosts costs, double rho,
                       AsyncSamplingModel sampler, double inner_tol)
    : g_(std::move(g)),
      costs_(std::move(costs)),
      rho_(rho),
      sampler_(sampler),
      inner_tol_(inner_tol),
      node_edges_(costs_.nodes),
      y_(zero_states(costs_.nodes, costs_.dim)),
      edge_aux_(g_.edges.size(), Vector::Zero(costs_.dim)) {
  if (rho_ <= 0.0) throw ConfigError("admm: rho must be > 0");
  edge_dual_.resize(g_.edges.size(),
                    {Vector::Zero(costs_.dim), Vector::Zero(costs_.dim)});
  for (std::size_t e = 0; e < g_.edges.size(); ++e) {
    node_edges_[g_.edges[e].first].push_back(static_cast<int>(e));
    node_edges_[g_.edges[e].second].push_back(static_cast<int>(e));
  }
}

void AdmmMethod::step(long t) {
  const int n = costs_.nodes;
  for (int i = 0; i < n; ++i) {
    std::vector<Vector> anchors;
    anchors.reserve(node_edges_[i].size());
    for (int e : node_edges_[i]) {
      int side = g_.edges[e].first == i ? 0 : 1;
      anchors.push_back(edge_aux_[e] - edge_dual_[e][side]);
    }
    y_[i] = local_argmin(costs_, i, sampler_.sample_time(i, t),
                         Vector::Zero(costs_.dim), rho_, anchors, inner_tol_);
  }
  for (std::size_t e = 0; e < g_.edges.size(); ++e) {
    auto [i, j] = g_.edges[e];
    edge_aux_[e] =
        0.5 * (y_[i] + edge_dual_[e][0] + y_[j] + edge_dual_[e][1]);
    edge_dual_[e][0] += y_[i] - edge_aux_[e];
    edge_dual_[e][1] += y_[j] - edge_aux_[e];
  }
}

DgdFixedPointReport dgd_fixed_point_check(const Graph& g, const LocalCosts& costs,
                                          double alpha, long t, double tol,
                                          long max_rounds) {
  MixingMatrix w = build_metropolis_weights(g);
  DgdMethod dgd(w, costs, DgdOptions{false, alpha});
  std::vector<Vector> prev = dgd.iterates();
  long rounds = 0;
  for (; rounds < max_rounds; ++rounds) {
    dgd.step(t);
    double move = 0.0;
    for (int i = 0; i < costs.nodes; ++i)
      move = std::max(move, (dgd.iterates()[i] - prev[i]).lpNorm<Eigen::Infinity>());
    prev = dgd.iterates();
    if (move <= tol) break;
  }
  if (rounds == max_rounds)
    throw std::runtime_error("dgd_fixed_point_check: no fixed point within cap");

  const int n = costs.nodes;
  const int dim = costs.dim;
  const int stacked_dim = n * dim;
  Matrix penalty = (Matrix::Identity(n, n) - w.w) / alpha;

  ProblemSlice modified;
  modified.t = t;
  modified.dim = stacked_dim;
  modified.smooth.mu = costs.mu;
  modified.smooth.lip = costs.lip + 2.0 / alpha;
  modified.smooth.is_quadratic = costs.is_quadratic;
  modified.smooth.eval = [&, t](const Vector& y) {
    double v = 0.0;
    for (int i = 0; i < n; ++i) v += costs.eval(i, t, y.segment(i * dim, dim));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (penalty(i, j) != 0.0)
          v += 0.5 * penalty(i, j) *
               y.segment(i * dim, dim).dot(y.segment(j * dim, dim));
    return v;
  };
  modified.smooth.grad = [&, t](const Vector& y) -> Vector {
    Vector grad(stacked_dim);
    for (int i = 0; i < n; ++i)
      grad.segment(i * dim, dim) = costs.grad(i, t, y.segment(i * dim, dim));
    for (int i = 0; i < n; ++i) {
      Vector acc = Vector::Zero(dim);
      for (int j = 0; j < n; ++j)
        if (penalty(i, j) != 0.0) acc += penalty(i, j) * y.segment(j * dim, dim);
      grad.segment(i * dim, dim) += acc;
    }
    return grad;
  };
  if (costs.is_quadratic && costs.hessian) {
    modified.smooth.hessian = [&, t]() {
      Matrix h = Matrix::Zero(stacked_dim, stacked_dim);
      for (int i = 0; i < n; ++i)
        h.block(i * dim, i * dim, dim, dim) = costs.hessian(i, t);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          h.block(i * dim, j * dim, dim, dim) +=
              penalty(i, j) * Matrix::Identity(dim, dim);
      return h;
    };
  }
  modified.reg = RegularizerSpec::zero();
  modified.set = FeasibleSet::all_space(stacked_dim);
  Vector y_mod = solvers::batch_solve(modified, 1e-12).x_star;

  ProblemSlice aggregate;
  aggregate.t = t;
  aggregate.dim = dim;
  aggregate.smooth.mu = costs.mu * n;
  aggregate.smooth.lip = costs.lip * n;
  aggregate.smooth.is_quadratic = costs.is_quadratic;
  aggregate.smooth.eval = [&, t](const Vector& x) {
    double v = 0.0;
    for (int i = 0; i < n; ++i) v += costs.eval(i, t, x);
    return v;
  };
  aggregate.smooth.grad = [&, t](const Vector& x) -> Vector {
    Vector g = Vector::Zero(dim);
    for (int i = 0; i < n; ++i) g += costs.grad(i, t, x);
    return g;
  };
  if (costs.is_quadratic && costs.hessian) {
    aggregate.smooth.hessian = [&, t]() {
      Matrix h = Matrix::Zero(dim, dim);
      for (int i = 0; i < n; ++i) h += costs.hessian(i, t);
      return h;
    };
  }
  aggregate.reg = RegularizerSpec::zero();
  aggregate.set = FeasibleSet::all_space(dim);
  Vector x_star = solvers::batch_solve(aggregate, 1e-12).x_star;

  DgdFixedPointReport report;
  report.fixed_point.resize(stacked_dim);
  for (int i = 0; i < n; ++i)
    report.fixed_point.segment(i * dim, dim) = dgd.iterates()[i];
  report.modified_solution = std::move(y_mod);
  report.consensus_optimum.resize(stacked_dim);
  for (int i = 0; i < n; ++i)
    report.consensus_optimum.segment(i * dim, dim) = x_star;
  report.gap_to_modified =
      (report.fixed_point - report.modified_solution).norm();
  report.gap_to_consensus =
      (report.fixed_point - report.consensus_optimum).norm();
  report.iterations = rounds;
  return report;
}

double iterate_spread(const std::vector<Vector>& y) {
  double spread = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t j = i + 1; j < y.size(); ++j)
      spread = std::max(spread, (y[i] - y[j]).norm());
  return spread;
}

std::vector<Fig6Series> run_fig6_experiment(const Fig6Config& cfg) {
  Graph g = cfg.graph_file.empty()
                ? random_connected_graph(cfg.nodes, cfg.edge_probability,
                                         cfg.graph_seed)
                : Graph::from_edge_list_file(cfg.graph_file);
  MixingMatrix w = build_metropolis_weights(g);

  problems::ConsensusCostConfig static_cfg;
  static_cfg.nodes = g.nodes;
  static_cfg.omega = 0.0;
  static_cfg.b_freq = 0.0;
  static_cfg.seed = cfg.cost_seed;
  problems::ConsensusCostConfig tv_cfg;
  tv_cfg.nodes = g.nodes;
  tv_cfg.seed = cfg.cost_seed;

  struct Scenario {
    std::string name;
    std::shared_ptr<const problems::ConsensusCostGen> gen;
    AsyncSamplingModel sampler;
  };
  std::vector<Scenario> scenarios = {
      {"static", std::make_shared<problems::ConsensusCostGen>(static_cfg), {}},
      {"tv_synchronous", std::make_shared<problems::ConsensusCostGen>(tv_cfg), {}},
      {"tv_asynchronous", std::make_shared<problems::ConsensusCostGen>(tv_cfg),
       {cfg.max_delay, cfg.async_seed}},
  };

  std::vector<Fig6Series> out;
  for (const auto& scenario : scenarios) {
    LocalCosts costs = consensus_costs(scenario.gen);

    std::vector<std::unique_ptr<DistributedMethod>> methods;
    methods.push_back(std::make_unique<DgdMethod>(
        w, costs, DgdOptions{true, cfg.dgd_alpha0}, scenario.sampler));
    methods.push_back(std::make_unique<DgdMethod>(
        w, costs, DgdOptions{false, cfg.dgd_constant_alpha}, scenario.sampler));
    methods.push_back(std::make_unique<ExtraMethod>(w, costs, cfg.extra_alpha,
                                                    scenario.sampler));
    methods.push_back(std::make_unique<DualDecompositionMethod>(
        g, costs, cfg.dual_decomp_alpha, scenario.sampler));
    methods.push_back(
        std::make_unique<AdmmMethod>(g, costs, cfg.admm_rho, scenario.sampler));

    std::vector<Fig6Series> series(methods.size());
    for (std::size_t m = 0; m < methods.size(); ++m) {
      series[m].scenario = scenario.name;
      series[m].method = methods[m]->name();
      series[m].avg_tracking_error.reserve(cfg.horizon);
    }

    for (long t = 1; t <= cfg.horizon; ++t) {
      Vector x_star =
          solvers::batch_solve(scenario.gen->aggregate_slice(t), cfg.oracle_tol)
              .x_star;
      for (std::size_t m = 0; m < methods.size(); ++m) {
        methods[m]->step(t);
        double err = 0.0;
        for (const auto& y : methods[m]->iterates()) err += (y - x_star).norm();
        series[m].avg_tracking_error.push_back(err / g.nodes);
      }
    }
    for (auto& s : series) out.push_back(std::move(s));
  }
  return out;
}

void write_fig6_csv(const std::vector<Fig6Series>& series, std::ostream& out) {
  out << "scenario,method,t,avg_tracking_error\n";
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.avg_tracking_error.size(); ++i)
      out << s.scenario << ',' << s.method << ',' << (i + 1) << ','
          << format_g17(s.avg_tracking_error[i]) << '\n';
}

}  // namespace tvopt::dist
