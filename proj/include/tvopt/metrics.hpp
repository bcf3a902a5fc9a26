#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "tvopt/core.hpp"
#include "tvopt/solvers.hpp"

namespace tvopt::metrics {

/// Per-step values of one metric plus its running aggregate.
struct MetricSeries {
  std::string name;
  std::vector<double> values;
  std::vector<double> cumulative;  // running sum of values

  static MetricSeries from_values(std::string name, std::vector<double> values);
  std::size_t size() const { return values.size(); }
};

/// Empirical certification of one inequality: per-step lhs/rhs plus an
/// optional asymptotic (plateau) comparison. A violation is counted only when
/// lhs > rhs + tolerance.
struct BoundReport {
  std::string name;
  bool applicable = true;
  std::string reason;  // set when not applicable
  std::vector<long> steps;
  std::vector<double> lhs;
  std::vector<double> rhs;
  long violation_count = 0;
  double max_violation = 0.0;
  double tolerance = 1e-8;
  bool has_plateau_check = false;
  double plateau_lhs = 0.0;
  double plateau_rhs = 0.0;
  double plateau_tolerance = 1e-6;
  bool plateau_ok = true;
  std::map<std::string, double> params;

  bool passed() const {
    return applicable && violation_count == 0 && plateau_ok;
  }
  void finalize();  // recomputes violation_count / max_violation / plateau_ok
  void write_csv(std::ostream& out) const;  // columns: t, lhs, rhs, violated
  std::string summary() const;
};

using OracleSequence = std::vector<solvers::BatchOracleResult>;

/// ||x_t - x_t*|| per step.
MetricSeries tracking_error(const IterateTrace& trace, const OracleSequence& oracle);

/// Running sums of e_t and e_t^2 (cumulative fields are E_t and E'_t).
std::pair<MetricSeries, MetricSeries> gradient_error_accumulators(
    const IterateTrace& trace);

/// Per-step optimizer drift sigma_t = ||x_t* - x_{t-1}*||; cumulative is the
/// path length Sigma_t. Entry 0 is zero.
MetricSeries path_length(const OracleSequence& oracle);

/// Running sum of squared distances of the iterates to a fixed comparator.
MetricSeries comparator_variation(const IterateTrace& trace, const Vector& w);

struct CostVariation {
  MetricSeries value_shift;     // probe-sampled sup |f_t - f_{t-1}|
  MetricSeries gradient_shift;  // probe-sampled sup ||grad h_t - grad h_{t-1}||
};

/// Probe-sampled lower bounds on the cost/gradient temporal variation.
/// Probes must be feasible for every slice (validated by projection residual).
CostVariation cost_variation(const std::vector<ProblemSlice>& slices,
                             const std::vector<Vector>& probes);

/// Instantaneous regret f_t(x_t) - f_t*; cumulative is Reg_t.
MetricSeries dynamic_regret(const IterateTrace& trace, const OracleSequence& oracle);

struct ContractionParams {
  double alpha = 0.0;
  double mu = 0.0;
  double lip = 0.0;
  double tolerance = 1e-8;
  double plateau_tolerance = 1e-6;
  long burn_in = 5;              // first checked step
  double plateau_fraction = 0.2; // final fraction of the horizon
};

/// Per-step Q-linear check ||x_t - x_t*|| <= q ||x_{t-1} - x_{t-1}*|| +
/// q sigma_t + alpha e_t, with q = max{|1-alpha mu|, |1-alpha L|}, plus the
/// asymptotic plateau bound (alpha e + q sigma)/(1 - q).
BoundReport contraction_certificate(const IterateTrace& trace,
                                    const OracleSequence& oracle,
                                    const ContractionParams& params);

inline double plateau_bound(double q, double alpha, double e, double sigma) {
  return (alpha * e + q * sigma) / (1.0 - q);
}

struct PrimalDualParams {
  double alpha = 0.0;
  double mu = 0.0;    // strong convexity of the smooth part
  double r = 0.0;     // dual regularization
  double lip_pd = 0.0;  // Lipschitz constant of the primal-dual operator
  double tolerance = 1e-8;
  double plateau_tolerance = 1e-6;
  long burn_in = 5;
  double plateau_fraction = 0.2;
};

/// Same checks on the stacked z = (x, lambda) against saddle-point oracles,
/// with q = sqrt(1 - 2 alpha mu_low + alpha^2 lip_pd^2), mu_low = min(mu, r).
/// The report's params also carry the (>= 1) un-squared-step variant
/// q_as_printed = sqrt(1 - 2 alpha mu_low + lip_pd^2) for reference.
BoundReport primal_dual_certificate(
    const IterateTrace& trace,
    const std::vector<std::pair<Vector, Vector>>& saddle_oracle,
    const PrimalDualParams& params);

enum class ComparatorMode {
  RunningMeanOfMinimizers,  // w_t = mean of x_0*..x_t*
  Fixed,
};

struct RegretBoundParams {
  double lip = 0.0;         // L with alpha = 1/L
  double alpha_used = 0.0;  // step size the solver actually ran with
  ComparatorMode comparator = ComparatorMode::RunningMeanOfMinimizers;
  Vector fixed_comparator;
  double tolerance = 1e-8;
};

/// Reg_t <= L/2 (||x_0 - w_t||^2 + sum_{tau>=1} ||x_tau - w_t||^2) + E'_t/(2L).
/// Marked not-applicable unless alpha_used == 1/L.
BoundReport regret_bound_check(const IterateTrace& trace,
                               const OracleSequence& oracle,
                               const RegretBoundParams& params);

/// Per-step Reg_t / (1 + E_t + Sigma_t), used for boundedness checks.
MetricSeries regret_growth_ratio(const MetricSeries& regret, const MetricSeries& e,
                                 const MetricSeries& sigma);

}  // namespace tvopt::metrics
