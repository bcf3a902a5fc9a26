#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tvopt/config.hpp"
#include "tvopt/core.hpp"
#include "tvopt/metrics.hpp"
#include "tvopt/problems.hpp"

namespace tvopt::cli {

inline constexpr const char* kToolkitVersion = "0.1.0";
inline constexpr const char* kOutputRootEnv = "TVOPT_OUT_ROOT";

// ---------------------------------------------------------------------------
// Extra generators used by configs and presets.
// ---------------------------------------------------------------------------

/// Quadratic h(x) = 0.5 (x - c_t)' H (x - c_t) with H = Q diag(d) Q' of
/// selectable rank, plus a drifting center. Covers static sanity instances,
/// anisotropic drift instances and singular (subspace) quadratics.
struct ToyQuadraticConfig {
  int dim = 1;
  long horizon = 100;
  std::vector<double> eigenvalues = {1.0};  // padded/truncated to rank
  int rank = -1;                            // < 0 means full rank
  bool rotate = false;                      // random orthonormal basis if true
  std::string drift = "none";               // none | linear | sin
  double drift_step = 0.0;                  // linear: step norm per time step
  int drift_axis = 0;                       // linear: basis axis to drift along
  double drift_amplitude = 0.0;             // sin
  double drift_period = 100.0;              // sin
  std::uint64_t seed = 0;
};

class ToyQuadraticGen : public ProblemGenerator {
 public:
  explicit ToyQuadraticGen(ToyQuadraticConfig cfg);
  int dimension() const override { return cfg_.dim; }
  long horizon() const override { return cfg_.horizon; }
  ProblemSlice slice_at(long t) const override;
  Vector center_at(long t) const;
  const Matrix& hessian() const { return h_; }
  const ToyQuadraticConfig& config() const { return cfg_; }

 private:
  ToyQuadraticConfig cfg_;
  Matrix h_;
  Vector base_, phases_;
};

/// Strongly convex quadratic with one affine inequality constraint
/// c(x) = offset - row' x <= 0, dualized by the primal-dual solver.
struct ConstrainedQuadraticConfig {
  int dim = 1;
  long horizon = 100;
  std::vector<double> constraint_row = {1.0};
  double constraint_offset = 1.0;
  std::uint64_t seed = 0;
};

class ConstrainedQuadraticGen : public ProblemGenerator {
 public:
  explicit ConstrainedQuadraticGen(ConstrainedQuadraticConfig cfg);
  int dimension() const override { return cfg_.dim; }
  long horizon() const override { return cfg_.horizon; }
  ProblemSlice slice_at(long t) const override;
  /// Same cost with the constraint folded into the feasible set; its
  /// batch solution is the true constrained optimum.
  ProblemSlice oracle_slice_at(long t) const;
  /// Lipschitz constant of the regularized primal-dual operator.
  double pd_lipschitz(double r) const;
  const ConstrainedQuadraticConfig& config() const { return cfg_; }

 private:
  ConstrainedQuadraticConfig cfg_;
  Vector row_;
};

// ---------------------------------------------------------------------------
// Experiment execution.
// ---------------------------------------------------------------------------

struct SolverOutcome {
  std::string label;
  IterateTrace trace;
  std::map<std::string, metrics::MetricSeries> series;
  std::vector<metrics::BoundReport> bounds;
};

struct RunResult {
  std::filesystem::path directory;
  std::vector<SolverOutcome> solvers;
  double final_tracking_error = std::numeric_limits<double>::quiet_NaN();
  double final_regret = std::numeric_limits<double>::quiet_NaN();
  long bound_violations = 0;
};

/// Executes a parsed config and writes trace/metrics/bounds CSVs plus the
/// run manifest into outdir. Dispatches to the dedicated experiment paths
/// when an [experiment] section is present.
RunResult run_experiment(const ConfigFile& cfg,
                         const std::filesystem::path& outdir);

/// Built-in experiment configurations.
std::vector<std::string> preset_names();
ConfigFile preset_config(const std::string& name);

/// Applies --seed-override semantics: problem/experiment seed = seed,
/// noise seed = seed + 1000003.
void override_seeds(ConfigFile& cfg, std::uint64_t seed);

struct SweepResult {
  std::filesystem::path directory;
  int total = 0;
  int failed = 0;
};

/// One run per grid point (cross product of the value lists); failures are
/// recorded in summary.csv and the sweep continues.
SweepResult run_sweep(
    const ConfigFile& base,
    const std::vector<std::pair<std::string, std::vector<std::string>>>& grid,
    const std::filesystem::path& outdir);

/// Reformats a finished run directory into per-method (t, value) plot files.
std::vector<std::filesystem::path> write_report(
    const std::filesystem::path& rundir);

/// Resolves an output path against TVOPT_OUT_ROOT when it is relative.
std::filesystem::path resolve_out_dir(const std::string& out);

}  // namespace tvopt::cli
