#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nandevo/analysis.hpp"
#include "nandevo/experiment.hpp"

using namespace nandevo;
namespace fs = std::filesystem;

namespace {

CumulativeSeries series(std::initializer_list<double> v, Metric m = Metric::inventions) {
  CumulativeSeries s;
  s.metric = m;
  s.values = Eigen::VectorXd(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) s.values(i++) = x;
  return s;
}

CumulativeSeries from_function(int n, double (*f)(double)) {
  CumulativeSeries s;
  s.values.resize(n);
  for (int t = 1; t <= n; ++t) s.values(t - 1) = f(t);
  return s;
}

// Step-like accumulation: bursts of rapid growth followed by plateaus.
double repeated_sigmoid(double t) {
  double y = 0.0;
  for (double centre : {150.0, 450.0, 750.0}) y += 10.0 / (1.0 + std::exp(-(t - centre) / 8.0));
  return y;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("nandevo_analysis_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("cumulative counts events up to each trial") {
  std::vector<Event> events = {{3, 0, EventKind::invention, "", 2, 0.5, true}};
  const auto s = cumulative(events, Metric::inventions, 5);
  CHECK(s.values == series({0, 0, 1, 1, 1}).values);
  CHECK(cumulative({}, Metric::junk, 4).values == series({0, 0, 0, 0}).values);

  std::vector<Event> junk;
  for (int t = 1; t <= 3; ++t)
    for (int a = 0; a < 8; ++a) junk.push_back({t, a, EventKind::junk, "", 4, std::nullopt, false});
  CHECK(cumulative(junk, Metric::junk, 3).values == series({8, 16, 24}).values);
}

TEST_CASE("goal series counts each goal once") {
  std::vector<Event> events = {{2, 0, EventKind::goal, "OR", 3, 1.0, true},
                               {2, 1, EventKind::goal, "OR", 3, 1.0, false}};
  CHECK(cumulative(events, Metric::goals, 3).values == series({0, 1, 1}).values);
}

TEST_CASE("metric names") {
  for (Metric m : kAllMetrics) CHECK(parse_metric(to_string(m)) == m);
  CHECK_THROWS_AS(parse_metric("speed"), UsageError);
}

TEST_CASE("average_series") {
  const auto a = series({1, 2, 3});
  std::vector<CumulativeSeries> same = {a, a};
  CHECK(average_series(same).values == a.values);

  std::vector<CumulativeSeries> two = {series({2, 2, 2, 2}), series({4, 4})};
  const auto avg = average_series(two);
  CHECK(avg.length() == 2);
  CHECK(avg.values(1) == 3.0);

  CHECK_THROWS_AS(average_series(std::vector<CumulativeSeries>{}), UsageError);

  // Commutes with scaling.
  std::vector<CumulativeSeries> xs = {series({1, 3, 7}), series({2, 2, 9})};
  std::vector<CumulativeSeries> scaled = xs;
  for (auto& s : scaled) s.values *= 2.5;
  CHECK((average_series(scaled).values - 2.5 * average_series(xs).values).norm() < 1e-12);
}

TEST_CASE("scale_baseline") {
  CumulativeSeries linear = from_function(100, [](double t) { return t; });
  CHECK(scale_baseline(linear, 1).values == linear.values);
  const auto two = scale_baseline(linear, 2);
  CHECK(two.length() == 50);
  CHECK(two.values(0) == 2.0);  // point t=1 from input point t=2
  CHECK(two.values(49) == 100.0);
  const auto four = scale_baseline(linear, 4);
  for (Eigen::Index t = 1; t <= four.length(); ++t) REQUIRE(four.values(t - 1) == 4.0 * static_cast<double>(t));
  // n then m equals n*m on the overlap.
  CumulativeSeries noisy = from_function(97, [](double t) { return std::floor(std::sqrt(t) * 3.0); });
  const auto nm = scale_baseline(scale_baseline(noisy, 2), 3);
  const auto direct = scale_baseline(noisy, 6);
  const Eigen::Index overlap = std::min(nm.length(), direct.length());
  CHECK(nm.values.head(overlap) == direct.values.head(overlap));
  CHECK_THROWS_AS(scale_baseline(linear, 0), UsageError);
}

TEST_CASE("fit_power recovers exact power laws") {
  for (double a : {0.5, 1.0, 3.0})
    for (double b : {0.5, 1.0, 1.3}) {
      CumulativeSeries s;
      s.values.resize(400);
      for (int t = 1; t <= 400; ++t) s.values(t - 1) = a * std::pow(t, b);
      const auto fit = fit_power(s);
      INFO("a=" << a << " b=" << b);
      CHECK(std::abs(fit.b - b) < 1e-6);
      CHECK(std::abs(fit.a - a) < 1e-6 * a);
      CHECK(fit.nrmse < 1e-6);
    }
}

TEST_CASE("fit_power refines a poor log-log start in linear space") {
  // Additive offset makes log-log biased; the linear-space objective must
  // not be worse than the log-log estimate.
  CumulativeSeries s = from_function(300, [](double t) { return 2.0 * std::pow(t, 0.7) + 5.0; });
  const auto fit = fit_power(s);
  const Eigen::VectorXd t = s.trials();
  const double sse_loglog = (s.values.array() - fit.loglog_a * t.array().pow(fit.loglog_b)).square().sum();
  const double sse_fit = (s.values.array() - fit.a * t.array().pow(fit.b)).square().sum();
  CHECK(sse_fit <= sse_loglog);
  CHECK(fit.iterations <= 100);
}

TEST_CASE("fit_power works on float scalars") {
  Eigen::VectorXf t = Eigen::VectorXf::LinSpaced(50, 1.0f, 50.0f);
  Eigen::VectorXf y = 3.0f * t.array().sqrt();
  const auto fit = fit_power(t, y);
  CHECK(std::abs(fit.b - 0.5f) < 1e-3f);
}

TEST_CASE("fit_power rejects degenerate input") {
  CHECK_THROWS_AS(fit_power(series({0, 0, 0, 0})), FitError);
  CHECK_THROWS_AS(fit_power(series({0, 0, 1, 1})), FitError);
}

TEST_CASE("nrmse is unit-independent") {
  CumulativeSeries s = from_function(500, repeated_sigmoid);
  CumulativeSeries scaled = s;
  scaled.values *= 37.0;
  CHECK(fit_power(s).nrmse == doctest::Approx(fit_power(scaled).nrmse).epsilon(1e-6));
}

TEST_CASE("repeated-sigmoid accumulation fits a power law worse than steady accumulation") {
  const auto sig = from_function(900, repeated_sigmoid);
  CumulativeSeries lin;
  lin.values = sig.trials() * (sig.values(899) / 900.0);
  const auto fs_ = fit_power(sig);
  const auto fl = fit_power(lin);
  CHECK(fs_.nrmse > 0.01);
  CHECK(fs_.nrmse >= 2.0 * fl.nrmse);
}

TEST_CASE("report on an experiment directory") {
  const auto dir = scratch("exp");
  ExperimentConfig config;
  config.group_sizes = {1, 2, 4};
  config.replications = 3;
  config.max_trials = 400;
  config.master_seed = 5;
  config.out_dir = dir;
  config.jobs = 1;
  run_experiment(config);

  SUBCASE("complete directory") {
    const auto report = analyze_directory(dir);
    CHECK(report.exclusions.empty());
    REQUIRE(report.conditions.size() == 3);
    for (const auto& c : report.conditions) {
      CHECK(c.replications.size() == 3);
      CHECK(c.average.size() == 4);
      CHECK(c.baseline.size() == 4);
      for (const auto& [m, s] : c.average) {
        CHECK(s.length() == 400);
        for (Eigen::Index t = 1; t < s.length(); ++t) REQUIRE(s.values(t) >= s.values(t - 1));
      }
      CHECK(c.baseline.at(Metric::junk).length() == 400 / c.group_size);
    }
    // Junk per trial scales with group size when junk dominates.
    CHECK(report.condition(4)->mean_junk_per_trial > report.condition(1)->mean_junk_per_trial);

    const auto out = scratch("exp_out");
    write_report(report, out);
    for (int g : {1, 2, 4})
      for (Metric m : kAllMetrics) {
        CHECK(fs::exists(out / ("average_g" + std::to_string(g) + "_" + to_string(m) + ".csv")));
        CHECK(fs::exists(out / ("baseline_g" + std::to_string(g) + "_" + to_string(m) + ".csv")));
      }
    std::ifstream fits(out / "fits.csv");
    std::string line;
    std::getline(fits, line);
    CHECK(line == "group_size,metric,status,a,b,rmse,nrmse,loglog_a,loglog_b,iterations");
    int rows = 0;
    while (std::getline(fits, line)) {
      ++rows;
      CHECK((line.find(",inventions,") != std::string::npos || line.find(",improvements,") != std::string::npos));
    }
    CHECK(rows == 6);
    std::ifstream cmp(out / "nrmse_comparison.csv");
    std::getline(cmp, line);
    CHECK(line == "group_size,nrmse_inventions,nrmse_improvements");
  }

  SUBCASE("missing and corrupt job files are excluded by name") {
    fs::remove(dir / events_file_name(2, 1));
    {
      std::ofstream corrupt(dir / events_file_name(4, 0), std::ios::app);
      corrupt << "12,0,warp,,1,,1\n";
    }
    const auto report = analyze_directory(dir);
    REQUIRE(report.exclusions.size() == 2);
    CHECK(report.exclusions[0].first == "g2_r1.events.csv");
    CHECK(report.exclusions[1].first == "g4_r0.events.csv");
    CHECK(report.condition(2)->replications.size() == 2);
    CHECK(report.condition(4)->replications.size() == 2);
    CHECK(report.condition(1)->replications.size() == 3);
  }

  SUBCASE("metric subset") {
    const Metric only[] = {Metric::goals};
    const auto report = analyze_directory(dir, only);
    CHECK(report.condition(1)->average.size() == 1);
    CHECK(report.condition(1)->fits.empty());
  }
}

TEST_CASE("suppressed junk is reconstructed from group size") {
  const auto full = scratch("junk_full");
  const auto sparse = scratch("junk_sparse");
  ExperimentConfig config;
  config.group_sizes = {2};
  config.replications = 1;
  config.max_trials = 300;
  config.jobs = 1;
  config.out_dir = full;
  run_experiment(config);
  config.out_dir = sparse;
  config.write_junk = false;
  run_experiment(config);
  const auto a = analyze_directory(full);
  const auto b = analyze_directory(sparse);
  CHECK(b.exclusions.empty());
  CHECK(a.condition(2)->average.at(Metric::junk).values == b.condition(2)->average.at(Metric::junk).values);
}
