#include "tvopt/metrics.hpp"

#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

namespace tvopt::metrics {

MetricSeries MetricSeries::from_values(std::string name,
                                       std::vector<double> values) {
  MetricSeries s;
  s.name = std::move(name);
  s.cumulative.reserve(values.size());
  double acc = 0.0;
  for (double v : values) {
    acc += v;
    s.cumulative.push_back(acc);
  }
  s.values = std::move(values);
  return s;
}

void BoundReport::finalize() {
  violation_count = 0;
  max_violation = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    double gap = lhs[i] - rhs[i];
    if (gap > tolerance) {
      ++violation_count;
      max_violation = std::max(max_violation, gap);
    }
  }
  if (has_plateau_check)
    plateau_ok = plateau_lhs <= plateau_rhs + plateau_tolerance;
}

void BoundReport::write_csv(std::ostream& out) const {
  out << "t,lhs,rhs,violated\n";
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    out << steps[i] << ',' << format_g17(lhs[i]) << ',' << format_g17(rhs[i])
        << ',' << (lhs[i] > rhs[i] + tolerance ? 1 : 0) << '\n';
  }
}

std::string BoundReport::summary() const {
  std::ostringstream os;
  os << "bound " << name << ": ";
  if (!applicable) {
    os << "not applicable (" << reason << ")\n";
    return os.str();
  }
  os << (passed() ? "PASS" : "FAIL") << ", " << violation_count << " violation(s) over "
     << lhs.size() << " step(s), max violation " << format_g17(max_violation)
     << ", tol " << format_g17(tolerance) << "\n";
  if (has_plateau_check) {
    os << "  plateau: measured " << format_g17(plateau_lhs) << " vs bound "
       << format_g17(plateau_rhs) << " (" << (plateau_ok ? "ok" : "violated")
       << ")\n";
  }
  for (const auto& [k, v] : params) os << "  " << k << " = " << format_g17(v) << "\n";
  return os.str();
}

MetricSeries tracking_error(const IterateTrace& trace,
                            const OracleSequence& oracle) {
  if (trace.size() != oracle.size())
    throw DimensionError("tracking_error: trace/oracle length mismatch");
  std::vector<double> v(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i)
    v[i] = (trace[i].x - oracle[i].x_star).norm();
  return MetricSeries::from_values("tracking_error", std::move(v));
}

std::pair<MetricSeries, MetricSeries> gradient_error_accumulators(
    const IterateTrace& trace) {
  std::vector<double> e(trace.size()), e2(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    e[i] = trace[i].e_true;
    e2[i] = trace[i].e_true * trace[i].e_true;
  }
  return {MetricSeries::from_values("gradient_error", std::move(e)),
          MetricSeries::from_values("gradient_error_sq", std::move(e2))};
}

MetricSeries path_length(const OracleSequence& oracle) {
  if (oracle.size() < 2)
    throw DimensionError("path_length: need at least two oracle points");
  std::vector<double> v(oracle.size(), 0.0);
  for (std::size_t i = 1; i < oracle.size(); ++i)
    v[i] = (oracle[i].x_star - oracle[i - 1].x_star).norm();
  return MetricSeries::from_values("path_length", std::move(v));
}

MetricSeries comparator_variation(const IterateTrace& trace, const Vector& w) {
  std::vector<double> v(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (trace[i].x.size() != w.size())
      throw DimensionError("comparator_variation: dimension mismatch");
    v[i] = (w - trace[i].x).squaredNorm();
  }
  return MetricSeries::from_values("comparator_variation", std::move(v));
}

CostVariation cost_variation(const std::vector<ProblemSlice>& slices,
                             const std::vector<Vector>& probes) {
  if (probes.empty()) throw ConfigError("cost_variation: empty probe set");
  for (const auto& slice : slices) {
    for (const auto& p : probes) {
      if ((slice.set.project(p) - p).norm() > 1e-9)
        throw ConfigError("cost_variation: probe infeasible for a slice");
    }
  }
  std::vector<double> df(slices.size(), 0.0), dg(slices.size(), 0.0);
  for (std::size_t i = 1; i < slices.size(); ++i) {
    double worst_f = 0.0, worst_g = 0.0;
    for (const auto& p : probes) {
      worst_f = std::max(worst_f,
                         std::abs(slices[i].objective(p) - slices[i - 1].objective(p)));
      worst_g = std::max(
          worst_g, (slices[i].smooth.grad(p) - slices[i - 1].smooth.grad(p)).norm());
    }
    df[i] = worst_f;
    dg[i] = worst_g;
  }
  return {MetricSeries::from_values("cost_shift", std::move(df)),
          MetricSeries::from_values("gradient_shift", std::move(dg))};
}

MetricSeries dynamic_regret(const IterateTrace& trace,
                            const OracleSequence& oracle) {
  if (trace.size() != oracle.size())
    throw DimensionError("dynamic_regret: trace/oracle length mismatch");
  std::vector<double> v(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i)
    v[i] = trace[i].f_value - oracle[i].f_star;
  return MetricSeries::from_values("instant_regret", std::move(v));
}

BoundReport contraction_certificate(const IterateTrace& trace,
                                    const OracleSequence& oracle,
                                    const ContractionParams& params) {
  BoundReport report;
  report.name = "contraction";
  report.tolerance = params.tolerance;
  report.plateau_tolerance = params.plateau_tolerance;

  double q = solvers::contraction_factor(params.alpha, params.mu, params.lip);
  report.params["q"] = q;
  report.params["alpha"] = params.alpha;
  report.params["mu"] = params.mu;
  report.params["lip"] = params.lip;

  if (params.mu <= 0.0 || q >= 1.0) {
    report.applicable = false;
    report.reason = "q >= 1 (needs strong convexity and alpha < 2/L)";
    return report;
  }
  if (trace.size() != oracle.size() || trace.size() < 2)
    throw DimensionError("contraction_certificate: bad trace/oracle lengths");

  MetricSeries dist = tracking_error(trace, oracle);
  MetricSeries sigma = path_length(oracle);

  double e_max = 0.0, sigma_max = 0.0;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    e_max = std::max(e_max, trace[i].e_true);
    sigma_max = std::max(sigma_max, sigma.values[i]);
  }
  report.params["e"] = e_max;
  report.params["sigma"] = sigma_max;

  long first = std::max<long>(1, params.burn_in);
  for (std::size_t i = static_cast<std::size_t>(first); i < trace.size(); ++i) {
    report.steps.push_back(trace[i].t);
    report.lhs.push_back(dist.values[i]);
    report.rhs.push_back(q * dist.values[i - 1] + q * sigma.values[i] +
                         params.alpha * trace[i].e_true);
  }

  report.has_plateau_check = true;
  std::size_t tail_start = static_cast<std::size_t>(
      static_cast<double>(trace.size()) * (1.0 - params.plateau_fraction));
  tail_start = std::min(tail_start, trace.size() - 1);
  double tail_max = 0.0;
  for (std::size_t i = tail_start; i < trace.size(); ++i)
    tail_max = std::max(tail_max, dist.values[i]);
  report.plateau_lhs = tail_max;
  report.plateau_rhs = plateau_bound(q, params.alpha, e_max, sigma_max);

  report.finalize();
  return report;
}

BoundReport primal_dual_certificate(
    const IterateTrace& trace,
    const std::vector<std::pair<Vector, Vector>>& saddle_oracle,
    const PrimalDualParams& params) {
  BoundReport report;
  report.name = "primal_dual_contraction";
  report.tolerance = params.tolerance;
  report.plateau_tolerance = params.plateau_tolerance;

  double mu_low = std::min(params.mu, params.r);
  double q_sq = 1.0 - 2.0 * params.alpha * mu_low +
                params.alpha * params.alpha * params.lip_pd * params.lip_pd;
  double q = q_sq > 0.0 ? std::sqrt(q_sq) : 0.0;
  report.params["q"] = q;
  report.params["mu_low"] = mu_low;
  report.params["alpha"] = params.alpha;
  report.params["lip_pd"] = params.lip_pd;
  // The un-squared-step-size variant exceeds 1 whenever lip_pd >= ~1; kept for
  // reference only.
  double q_ap_sq = 1.0 - 2.0 * params.alpha * mu_low + params.lip_pd * params.lip_pd;
  report.params["q_as_printed"] = q_ap_sq > 0.0 ? std::sqrt(q_ap_sq) : 0.0;

  if (params.r <= 0.0 || mu_low <= 0.0 || q >= 1.0) {
    report.applicable = false;
    report.reason = "q >= 1 (needs r > 0 and alpha < 2 min(mu, r) / lip_pd^2)";
    return report;
  }
  if (trace.size() != saddle_oracle.size() || trace.size() < 2)
    throw DimensionError("primal_dual_certificate: bad trace/oracle lengths");

  auto stacked_dist = [&](std::size_t i) {
    const auto& [xs, ls] = saddle_oracle[i];
    if (!trace[i].lambda)
      throw DimensionError("primal_dual_certificate: trace lacks dual iterates");
    return std::sqrt((trace[i].x - xs).squaredNorm() +
                     (*trace[i].lambda - ls).squaredNorm());
  };
  auto sigma_pd = [&](std::size_t i) {
    const auto& [xa, la] = saddle_oracle[i - 1];
    const auto& [xb, lb] = saddle_oracle[i];
    return std::sqrt((xb - xa).squaredNorm() + (lb - la).squaredNorm());
  };

  double e_max = 0.0, sigma_max = 0.0;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    e_max = std::max(e_max, trace[i].e_true);
    sigma_max = std::max(sigma_max, sigma_pd(i));
  }
  report.params["e"] = e_max;
  report.params["sigma_pd"] = sigma_max;

  long first = std::max<long>(1, params.burn_in);
  for (std::size_t i = static_cast<std::size_t>(first); i < trace.size(); ++i) {
    report.steps.push_back(trace[i].t);
    report.lhs.push_back(stacked_dist(i));
    report.rhs.push_back(q * stacked_dist(i - 1) + q * sigma_pd(i) +
                         params.alpha * trace[i].e_true);
  }

  report.has_plateau_check = true;
  std::size_t tail_start = static_cast<std::size_t>(
      static_cast<double>(trace.size()) * (1.0 - params.plateau_fraction));
  tail_start = std::min(tail_start, trace.size() - 1);
  double tail_max = 0.0;
  for (std::size_t i = tail_start; i < trace.size(); ++i)
    tail_max = std::max(tail_max, stacked_dist(i));
  report.plateau_lhs = tail_max;
  report.plateau_rhs = plateau_bound(q, params.alpha, e_max, sigma_max);

  report.finalize();
  return report;
}

BoundReport regret_bound_check(const IterateTrace& trace,
                               const OracleSequence& oracle,
                               const RegretBoundParams& params) {
  BoundReport report;
  report.name = "dynamic_regret_bound";
  report.tolerance = params.tolerance;
  report.params["lip"] = params.lip;
  report.params["alpha_used"] = params.alpha_used;

  if (params.lip <= 0.0 ||
      std::abs(params.alpha_used * params.lip - 1.0) > 1e-12) {
    report.applicable = false;
    report.reason = "bound requires alpha = 1/L";
    return report;
  }
  if (trace.size() != oracle.size() || trace.size() == 0)
    throw DimensionError("regret_bound_check: bad trace/oracle lengths");

  MetricSeries regret = dynamic_regret(trace, oracle);
  const double lip = params.lip;
  const Vector& x0 = trace[0].x;

  Vector mean_acc = Vector::Zero(x0.size());
  double e2_acc = 0.0;
  // Comparator variation excludes the initial point: the x_0 distance enters
  // the bound through its own term.
  for (std::size_t t = 1; t < trace.size(); ++t) {
    mean_acc += oracle[t - 1].x_star;
    e2_acc += trace[t].e_true * trace[t].e_true;

    Vector w;
    if (params.comparator == ComparatorMode::Fixed) {
      w = params.fixed_comparator;
      if (w.size() != x0.size())
        throw DimensionError("regret_bound_check: comparator dimension mismatch");
    } else {
      w = (mean_acc + oracle[t].x_star) / static_cast<double>(t + 1);
    }

    double variation = 0.0;
    for (std::size_t tau = 1; tau <= t; ++tau)
      variation += (trace[tau].x - w).squaredNorm();

    report.steps.push_back(trace[t].t);
    report.lhs.push_back(regret.cumulative[t]);
    report.rhs.push_back(0.5 * lip * ((x0 - w).squaredNorm() + variation) +
                         e2_acc / (2.0 * lip));
  }

  report.finalize();
  return report;
}

MetricSeries regret_growth_ratio(const MetricSeries& regret, const MetricSeries& e,
                                 const MetricSeries& sigma) {
  if (regret.size() != e.size() || regret.size() != sigma.size())
    throw DimensionError("regret_growth_ratio: series length mismatch");
  std::vector<double> v(regret.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = regret.cumulative[i] / (1.0 + e.cumulative[i] + sigma.cumulative[i]);
  return MetricSeries::from_values("regret_growth_ratio", std::move(v));
}

}  // namespace tvopt::metrics
