#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nandevo/engine.hpp"

namespace nandevo {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Metric { goals, inventions, improvements, junk };

inline constexpr Metric kAllMetrics[] = {Metric::goals, Metric::inventions, Metric::improvements, Metric::junk};

std::string to_string(Metric metric);
/// Throws UsageError for names other than goals, inventions, improvements, junk.
Metric parse_metric(const std::string& name);
EventKind event_kind(Metric metric) noexcept;

/// Cumulative count per trial; values(t - 1) is the count at trial t.
struct CumulativeSeries {
  Metric metric = Metric::inventions;
  Eigen::VectorXd values;

  Eigen::Index length() const noexcept { return values.size(); }
  /// Trials 1..length as doubles.
  Eigen::VectorXd trials() const { return Eigen::VectorXd::LinSpaced(length(), 1.0, static_cast<double>(length())); }
};

/// Count of `metric` events with trial <= t, for t = 1..trials.
CumulativeSeries cumulative(std::span<const Event> events, Metric metric, int trials);

/// Pointwise arithmetic mean, truncated to the shortest series.
CumulativeSeries average_series(std::span<const CumulativeSeries> series);

/// Group-size-n prediction from a size-1 series: value at t is the input
/// value at n*t, for t up to floor(length / n).
CumulativeSeries scale_baseline(const CumulativeSeries& size1, int n);

template <class Scalar>
struct PowerFit {
  Scalar a{};
  Scalar b{};
  Scalar rmse{};
  Scalar nrmse{};  ///< rmse over the range (max - min) of the observations
  Scalar loglog_a{};
  Scalar loglog_b{};
  int iterations = 0;
};

namespace detail {

template <class Scalar>
Scalar sum_squared_residuals(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& t,
                             const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y, Scalar a, Scalar b) {
  return (y.array() - a * t.array().pow(b)).square().sum();
}

}  // namespace detail

/// Least-squares fit of y = a * t^b in linear space.
///
/// Starts from ordinary least squares on (log t, log y) over the points with
/// y > 0, then refines with damped Gauss-Newton (Levenberg-Marquardt
/// damping): at most 100 iterations, stopping once the relative parameter
/// step falls below 1e-9. Needs at least three points with y > 0 and t > 0.
template <class DerivedT, class DerivedY>
PowerFit<typename DerivedY::Scalar> fit_power(const Eigen::MatrixBase<DerivedT>& t_in,
                                              const Eigen::MatrixBase<DerivedY>& y_in) {
  using Scalar = typename DerivedY::Scalar;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Vec t = t_in.template cast<Scalar>();
  const Vec y = y_in;
  if (t.size() != y.size()) throw FitError("fit_power: t and y differ in length");
  if ((t.array() <= Scalar(0)).any()) throw FitError("fit_power: t must be positive");

  const Eigen::Index positive = (y.array() > Scalar(0)).count();
  if (positive < 3) throw FitError("fit_power: fit undefined, fewer than three positive observations");

  // Log-log initialization.
  Eigen::Matrix<Scalar, Eigen::Dynamic, 2> design(positive, 2);
  Vec logy(positive);
  for (Eigen::Index i = 0, k = 0; i < y.size(); ++i) {
    if (y(i) <= Scalar(0)) continue;
    design(k, 0) = Scalar(1);
    design(k, 1) = std::log(t(i));
    logy(k) = std::log(y(i));
    ++k;
  }
  const Eigen::Matrix<Scalar, 2, 1> init = design.colPivHouseholderQr().solve(logy);

  PowerFit<Scalar> fit;
  fit.loglog_a = std::exp(init(0));
  fit.loglog_b = init(1);

  Scalar a = fit.loglog_a;
  Scalar b = fit.loglog_b;
  Scalar sse = detail::sum_squared_residuals(t, y, a, b);
  Scalar lambda = Scalar(1e-3);
  const Vec logt = t.array().log();

  for (int iter = 0; iter < 100; ++iter) {
    fit.iterations = iter + 1;
    const Vec model = a * t.array().pow(b);
    const Vec residual = y - model;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 2> jac(t.size(), 2);
    jac.col(0) = t.array().pow(b);
    jac.col(1) = model.array() * logt.array();
    const Eigen::Matrix<Scalar, 2, 2> jtj = jac.transpose() * jac;
    const Eigen::Matrix<Scalar, 2, 1> jtr = jac.transpose() * residual;
    if (jtr.norm() == Scalar(0)) break;

    bool accepted = false;
    Eigen::Matrix<Scalar, 2, 1> step = Eigen::Matrix<Scalar, 2, 1>::Zero();
    for (int tries = 0; tries < 30 && !accepted; ++tries) {
      Eigen::Matrix<Scalar, 2, 2> damped = jtj;
      damped.diagonal() *= Scalar(1) + lambda;
      step = damped.ldlt().solve(jtr);
      const Scalar na = a + step(0);
      const Scalar nb = b + step(1);
      if (!(na > Scalar(0)) || !std::isfinite(nb)) {
        lambda *= Scalar(10);
        continue;
      }
      const Scalar nsse = detail::sum_squared_residuals(t, y, na, nb);
      if (nsse <= sse) {
        a = na;
        b = nb;
        sse = nsse;
        lambda = std::max(lambda / Scalar(10), Scalar(1e-12));
        accepted = true;
      } else {
        lambda *= Scalar(10);
      }
    }
    if (!accepted) break;
    const Scalar rel = std::max(std::abs(step(0)) / (std::abs(a) + Scalar(1e-300)),
                                std::abs(step(1)) / (std::abs(b) + Scalar(1e-300)));
    if (rel < Scalar(1e-9)) break;
  }

  fit.a = a;
  fit.b = b;
  fit.rmse = std::sqrt(sse / static_cast<Scalar>(y.size()));
  const Scalar range = y.maxCoeff() - y.minCoeff();
  fit.nrmse = range > Scalar(0) ? fit.rmse / range
                                : (fit.rmse == Scalar(0) ? Scalar(0) : std::numeric_limits<Scalar>::infinity());
  return fit;
}

PowerFit<double> fit_power(const CumulativeSeries& series);

/// Events of one job read back from its CSV file.
struct LoadedJob {
  int group_size = 0;
  int replication = 0;
  int termination_trial = 0;
  long goals_met = 0;
  long inventions = 0;
  long improvements = 0;
  long junk = 0;
  std::vector<Event> events;
};

/// Parses an events CSV. Throws std::runtime_error naming the file and line.
std::vector<Event> read_events_csv(const std::filesystem::path& path);

struct ConditionAnalysis {
  int group_size = 0;
  std::vector<int> replications;  ///< included replications
  std::map<Metric, CumulativeSeries> average;
  std::map<Metric, CumulativeSeries> baseline;  ///< present when size 1 was run
  std::map<Metric, PowerFit<double>> fits;
  std::map<Metric, std::string> fit_errors;
  double mean_goals_met = 0.0;
  double mean_junk_per_trial = 0.0;  ///< total junk / termination trial, averaged
};

struct AnalysisReport {
  std::vector<ConditionAnalysis> conditions;  ///< ascending group size
  std::vector<std::pair<std::string, std::string>> exclusions;  ///< (file, reason)

  const ConditionAnalysis* condition(int group_size) const;
};

/// Loads summary.csv and every job's events, excluding unreadable or
/// inconsistent jobs, and computes averages, baselines and fits.
AnalysisReport analyze_directory(const std::filesystem::path& experiment_dir,
                                 std::span<const Metric> metrics = kAllMetrics);

/// Writes average_g{n}_{metric}.csv, baseline_g{n}_{metric}.csv, fits.csv,
/// nrmse_comparison.csv and exclusions.csv into `out_dir`.
void write_report(const AnalysisReport& report, const std::filesystem::path& out_dir);

}  // namespace nandevo
