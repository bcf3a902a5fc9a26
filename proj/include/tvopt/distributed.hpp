#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "tvopt/core.hpp"
#include "tvopt/problems.hpp"

namespace tvopt::dist {

struct Graph {
  int nodes = 0;
  std::vector<std::pair<int, int>> edges;  // undirected, no self loops

  void validate() const;  // indices in range, no self loops, connected
  bool connected() const;
  std::vector<int> degrees() const;

  /// One "i j" pair per line, 0-indexed; '#' starts a comment.
  static Graph from_edge_list_file(const std::string& path);
};

Graph random_connected_graph(int nodes, double edge_probability,
                             std::uint64_t seed);

/// Symmetric doubly stochastic consensus weights over a graph.
struct MixingMatrix {
  Matrix w;
  void validate(const Graph& g, double tol = 1e-12) const;
};

/// w_ij = 1 / (1 + max(deg_i, deg_j)) on edges, remainder on the diagonal.
MixingMatrix build_metropolis_weights(const Graph& g);

/// Per-node local costs the simulator steps against. is_quadratic (with a
/// constant per-(i,t) Hessian) unlocks exact local solves.
struct LocalCosts {
  int nodes = 0;
  int dim = 1;
  double mu = 0.0;
  double lip = 1.0;
  bool is_quadratic = false;
  std::function<double(int, long, const Vector&)> eval;
  std::function<Vector(int, long, const Vector&)> grad;
  std::function<Matrix(int, long)> hessian;  // only when is_quadratic
};

LocalCosts consensus_costs(std::shared_ptr<const problems::ConsensusCostGen> gen);

/// Heterogeneous scalar quadratics 0.5 * curvature_i (x - center_i)^2.
LocalCosts quadratic_costs(std::vector<double> curvature, std::vector<double> center);

/// Per-round cost sampling times: node i at round t works on the slice from
/// t_i = max(0, t - d) with d drawn uniformly on {0, ..., max_delay}.
struct AsyncSamplingModel {
  int max_delay = 0;
  std::uint64_t seed = 0;

  long sample_time(int node, long t) const;
};

/// One synchronized round of a decentralized method. Nodes read neighbor
/// state from the previous round only.
class DistributedMethod {
 public:
  virtual ~DistributedMethod() = default;
  virtual void step(long t) = 0;
  virtual const std::vector<Vector>& iterates() const = 0;
  virtual std::string name() const = 0;
};

struct DgdOptions {
  bool vanishing = false;  // alpha_t = alpha0 / t, else constant alpha0
  double alpha0 = 0.05;
};

class DgdMethod : public DistributedMethod {
 public:
  DgdMethod(MixingMatrix w, LocalCosts costs, DgdOptions opt,
            AsyncSamplingModel sampler = {});
  void step(long t) override;
  const std::vector<Vector>& iterates() const override { return y_; }
  std::string name() const override {
    return opt_.vanishing ? "dgd_vanishing" : "dgd_constant";
  }

 private:
  MixingMatrix w_;
  LocalCosts costs_;
  DgdOptions opt_;
  AsyncSamplingModel sampler_;
  std::vector<Vector> y_;
};

/// Stacked-form single update y' = W y - alpha v; used to cross-check the
/// per-node recursion.
std::vector<Vector> dgd_stacked_step(const std::vector<Vector>& y,
                                     const MixingMatrix& w,
                                     const LocalCosts& costs, long t,
                                     double alpha,
                                     const AsyncSamplingModel& sampler = {});

class ExtraMethod : public DistributedMethod {
 public:
  ExtraMethod(MixingMatrix w, LocalCosts costs, double alpha,
              AsyncSamplingModel sampler = {});
  void step(long t) override;
  const std::vector<Vector>& iterates() const override { return y_; }
  std::string name() const override { return "extra"; }

 private:
  MixingMatrix w_;
  Matrix w_tilde_;
  LocalCosts costs_;
  double alpha_;
  AsyncSamplingModel sampler_;
  std::vector<Vector> y_, y_prev_, grad_prev_;
  bool first_ = true;
};

class DualDecompositionMethod : public DistributedMethod {
 public:
  DualDecompositionMethod(Graph g, LocalCosts costs, double dual_step,
                          AsyncSamplingModel sampler = {},
                          double inner_tol = 1e-10);
  void step(long t) override;
  const std::vector<Vector>& iterates() const override { return y_; }
  std::string name() const override { return "dual_decomposition"; }

 private:
  Graph g_;
  LocalCosts costs_;
  double dual_step_;
  AsyncSamplingModel sampler_;
  double inner_tol_;
  std::vector<Vector> y_;
  std::vector<Vector> edge_dual_;  // one multiplier per edge (i < j orientation)
};

class AdmmMethod : public DistributedMethod {
 public:
  AdmmMethod(Graph g, LocalCosts costs, double rho,
             AsyncSamplingModel sampler = {}, double inner_tol = 1e-10);
  void step(long t) override;
  const std::vector<Vector>& iterates() const override { return y_; }
  std::string name() const override { return "admm"; }

 private:
  Graph g_;
  LocalCosts costs_;
  double rho_;
  AsyncSamplingModel sampler_;
  double inner_tol_;
  std::vector<std::vector<int>> node_edges_;
  std::vector<Vector> y_;
  std::vector<Vector> edge_aux_;                 // z_e
  std::vector<std::array<Vector, 2>> edge_dual_; // scaled duals per endpoint
};

struct DgdFixedPointReport {
  Vector fixed_point;        // stacked node iterates at the numerical fixed point
  Vector modified_solution;  // minimizer of sum h_i(y_i) + y'(I-W)y / (2 alpha)
  Vector consensus_optimum;  // 1 (x) x* of the aggregate problem
  double gap_to_modified = 0.0;
  double gap_to_consensus = 0.0;
  long iterations = 0;
};

/// Runs constant-step DGD on static costs to a numerical fixed point and
/// compares it against the penalized-problem solution and the true optimum.
DgdFixedPointReport dgd_fixed_point_check(const Graph& g, const LocalCosts& costs,
                                          double alpha, long t = 0,
                                          double tol = 1e-13,
                                          long max_rounds = 2000000);

/// Largest pairwise iterate distance (consensus violation).
double iterate_spread(const std::vector<Vector>& y);

// ---------------------------------------------------------------------------
// The 20-node tracking experiment: five methods, three sampling scenarios.
// ---------------------------------------------------------------------------

struct Fig6Config {
  int nodes = 20;
  long horizon = 800;
  double edge_probability = 0.15;
  std::string graph_file;  // optional: read the graph instead of sampling one
  std::uint64_t graph_seed = 3;
  std::uint64_t cost_seed = 7;
  std::uint64_t async_seed = 11;
  int max_delay = 10;
  double dgd_alpha0 = 1.0;          // vanishing schedule alpha0 / t
  double dgd_constant_alpha = 0.05;
  double extra_alpha = 0.1;
  double dual_decomp_alpha = 0.1;   // must stay below 2 mu / lambda_max(Laplacian)
  double admm_rho = 1.0;
  double oracle_tol = 1e-10;
};

struct Fig6Series {
  std::string scenario;  // static | tv_synchronous | tv_asynchronous
  std::string method;
  std::vector<double> avg_tracking_error;
};

std::vector<Fig6Series> run_fig6_experiment(const Fig6Config& cfg);

/// CSV columns: scenario, method, t, avg_tracking_error.
void write_fig6_csv(const std::vector<Fig6Series>& series, std::ostream& out);

}  // namespace tvopt::dist
