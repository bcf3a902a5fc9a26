#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "tvopt/core.hpp"
#include "tvopt/distributed.hpp"
#include "tvopt/metrics.hpp"
#include "tvopt/problems.hpp"
#include "tvopt/runner.hpp"
#include "tvopt/solvers.hpp"

namespace py = pybind11;
using namespace tvopt;

namespace {

Vector solve_lasso(const Matrix& a, const Vector& b, double lambda, double tol) {
  if (a.rows() != b.size()) throw DimensionError("solve_lasso: rows(A) != size(b)");
  auto gram = std::make_shared<Matrix>(a.transpose() * a);
  auto lin = std::make_shared<Vector>(a.transpose() * b);
  double bb = b.squaredNorm();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(*gram);

  ProblemSlice s;
  s.dim = static_cast<int>(a.cols());
  s.smooth.mu = std::max(0.0, eig.eigenvalues().minCoeff());
  s.smooth.lip = std::max(eig.eigenvalues().maxCoeff(), 1e-12);
  s.smooth.is_quadratic = true;
  s.smooth.eval = [gram, lin, bb](const Vector& x) {
    return 0.5 * x.dot((*gram) * x) - lin->dot(x) + 0.5 * bb;
  };
  s.smooth.grad = [gram, lin](const Vector& x) -> Vector {
    return (*gram) * x - *lin;
  };
  s.reg = lambda > 0.0 ? RegularizerSpec::l1(lambda) : RegularizerSpec::zero();
  s.set = FeasibleSet::all_space(s.dim);
  return solvers::batch_solve(s, tol).x_star;
}

Matrix metropolis_weights(int nodes,
                          const std::vector<std::pair<int, int>>& edges) {
  dist::Graph g;
  g.nodes = nodes;
  g.edges = edges;
  return dist::build_metropolis_weights(g).w;
}

std::vector<double> tracking_error_series(const std::vector<Vector>& iterates,
                                          const std::vector<Vector>& optima) {
  if (iterates.size() != optima.size())
    throw DimensionError("tracking_error: length mismatch");
  std::vector<double> out(iterates.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = (iterates[i] - optima[i]).norm();
  return out;
}

}  // namespace

PYBIND11_MODULE(_tvopt, m) {
  m.doc() = "Streaming first-order optimization toolkit (C++ core)";
  m.attr("__version__") = cli::kToolkitVersion;

  // Proximal / projection primitives.
  m.def("soft_threshold", &soft_threshold, py::arg("y"), py::arg("threshold"),
        "Elementwise soft threshold.");
  m.def("singular_value_threshold", &singular_value_threshold, py::arg("y"),
        py::arg("threshold"), "Soft threshold on the singular values.");
  m.def(
      "prox_l1",
      [](const Vector& y, double weight, double alpha) {
        return prox(RegularizerSpec::l1(weight),
                    FeasibleSet::all_space(static_cast<int>(y.size())), alpha, y);
      },
      py::arg("y"), py::arg("weight"), py::arg("alpha") = 1.0);
  m.def(
      "project_box",
      [](const Vector& y, const Vector& lower, const Vector& upper) {
        return FeasibleSet::box(lower, upper).project(y);
      },
      py::arg("y"), py::arg("lower"), py::arg("upper"));
  m.def(
      "project_affine",
      [](const Vector& y, const Matrix& a, const Vector& b) {
        return FeasibleSet::affine(a, b).project(y);
      },
      py::arg("y"), py::arg("a"), py::arg("b"),
      "Euclidean projection onto {x : a x = b}.");

  // Problem-specific operations.
  m.def("ssc_project", &problems::ssc_project, py::arg("x"),
        "Projection onto {diag(X) = 0, columns sum to one}.");
  m.def("ssc_prox", &problems::ssc_prox, py::arg("y"), py::arg("alpha"),
        py::arg("weight"),
        "Exact prox of the l1 penalty over the same affine set.");
  m.def("rpca_smooth_gradient", &problems::rpca_smooth_gradient, py::arg("s"),
        py::arg("z"), py::arg("rho"),
        "Returns (gradient, low_rank_component).");
  m.def("rpca_objective", &problems::rpca_objective, py::arg("s"), py::arg("z"),
        py::arg("lambda_"), py::arg("rho"));
  m.def("softplus", &problems::softplus, py::arg("z"));
  m.def("logistic", &problems::logistic, py::arg("z"));

  // Solvers and bounds.
  m.def("solve_lasso", &solve_lasso, py::arg("a"), py::arg("b"),
        py::arg("lambda_") = 0.0, py::arg("tol") = 1e-10,
        "Batch minimizer of 0.5 ||A x - b||^2 + lambda ||x||_1.");
  m.def("contraction_factor", &solvers::contraction_factor, py::arg("alpha"),
        py::arg("mu"), py::arg("lip"));
  m.def("plateau_bound", &metrics::plateau_bound, py::arg("q"), py::arg("alpha"),
        py::arg("e"), py::arg("sigma"),
        "Asymptotic tracking-error bound (alpha e + q sigma) / (1 - q).");
  m.def("tracking_error", &tracking_error_series, py::arg("iterates"),
        py::arg("optima"));

  // Consensus machinery.
  m.def("metropolis_weights", &metropolis_weights, py::arg("nodes"),
        py::arg("edges"));

  // Experiment harness.
  m.def(
      "run_config",
      [](const std::string& path, const std::string& outdir) {
        auto result = cli::run_experiment(cli::ConfigFile::parse_file(path),
                                          std::filesystem::path(outdir));
        return result.directory.string();
      },
      py::arg("config_path"), py::arg("out_dir"));
  m.def(
      "run_preset",
      [](const std::string& name, const std::string& outdir,
         std::optional<long> seed) {
        cli::ConfigFile cfg = cli::preset_config(name);
        if (seed)
          cli::override_seeds(cfg, static_cast<std::uint64_t>(*seed));
        auto result = cli::run_experiment(cfg, std::filesystem::path(outdir));
        return result.directory.string();
      },
      py::arg("name"), py::arg("out_dir"), py::arg("seed") = std::nullopt);
  m.def(
      "report",
      [](const std::string& rundir) {
        std::vector<std::string> out;
        for (const auto& p : cli::write_report(std::filesystem::path(rundir)))
          out.push_back(p.string());
        return out;
      },
      py::arg("run_dir"));
  m.def("preset_names", &cli::preset_names);

  py::register_exception<ConfigError>(m, "ConfigurationError");
  py::register_exception<DimensionError>(m, "DimensionMismatchError");
  py::register_exception<ProxUnsupportedError>(m, "ProxUnsupportedError");
}
