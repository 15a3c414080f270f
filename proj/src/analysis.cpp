#include "nandevo/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nandevo/experiment.hpp"

namespace nandevo {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

template <class T>
T to_number(const std::string& s, const std::string& where) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw std::runtime_error(where + ": bad number '" + s + "'");
  return v;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

struct SummaryRow {
  int group_size;
  int replication;
  int termination_trial;
  long goals_met, inventions, improvements, junk;
};

std::vector<SummaryRow> read_summary(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  if (strip_cr(line) != "group_size,replication,seed,termination_trial,goals_met,inventions,improvements,junk")
    throw std::runtime_error(path.string() + ": unexpected header");
  std::vector<SummaryRow> rows;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(number);
    const auto f = split(line, ',');
    if (f.size() != 8) throw std::runtime_error(where + ": expected 8 fields");
    rows.push_back({to_number<int>(f[0], where), to_number<int>(f[1], where), to_number<int>(f[3], where),
                    to_number<long>(f[4], where), to_number<long>(f[5], where), to_number<long>(f[6], where),
                    to_number<long>(f[7], where)});
  }
  return rows;
}

bool counts_event(const Event& e, Metric metric) {
  if (e.kind != event_kind(metric)) return false;
  // Simultaneous attainments of one goal by several agents count once.
  return metric != Metric::goals || e.accepted;
}

}  // namespace

std::string to_string(Metric metric) {
  switch (metric) {
    case Metric::goals: return "goals";
    case Metric::inventions: return "inventions";
    case Metric::improvements: return "improvements";
    case Metric::junk: return "junk";
  }
  return "junk";
}

Metric parse_metric(const std::string& name) {
  for (Metric m : kAllMetrics)
    if (to_string(m) == name) return m;
  throw UsageError("unknown metric '" + name + "' (expected goals, inventions, improvements or junk)");
}

EventKind event_kind(Metric metric) noexcept {
  switch (metric) {
    case Metric::goals: return EventKind::goal;
    case Metric::inventions: return EventKind::invention;
    case Metric::improvements: return EventKind::improvement;
    case Metric::junk: return EventKind::junk;
  }
  return EventKind::junk;
}

CumulativeSeries cumulative(std::span<const Event> events, Metric metric, int trials) {
  CumulativeSeries s;
  s.metric = metric;
  s.values = Eigen::VectorXd::Zero(std::max(trials, 0));
  for (const auto& e : events)
    if (counts_event(e, metric) && e.trial >= 1 && e.trial <= trials) s.values(e.trial - 1) += 1.0;
  for (Eigen::Index t = 1; t < s.values.size(); ++t) s.values(t) += s.values(t - 1);
  return s;
}

CumulativeSeries average_series(std::span<const CumulativeSeries> series) {
  if (series.empty()) throw UsageError("average_series: no series given");
  Eigen::Index length = series.front().length();
  for (const auto& s : series) length = std::min(length, s.length());
  CumulativeSeries out;
  out.metric = series.front().metric;
  out.values = Eigen::VectorXd::Zero(length);
  for (const auto& s : series) out.values += s.values.head(length);
  out.values /= static_cast<double>(series.size());
  return out;
}

CumulativeSeries scale_baseline(const CumulativeSeries& size1, int n) {
  if (n < 1) throw UsageError("scale_baseline: n must be at least 1");
  CumulativeSeries out;
  out.metric = size1.metric;
  const Eigen::Index length = size1.length() / n;
  out.values = Eigen::Map<const Eigen::VectorXd, 0, Eigen::InnerStride<>>(size1.values.data() + (n - 1), length,
                                                                          Eigen::InnerStride<>(n));
  return out;
}

PowerFit<double> fit_power(const CumulativeSeries& series) { return fit_power(series.trials(), series.values); }

std::vector<Event> read_events_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot read file");
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "trial,agent,event,goal,cost,closeness,accepted")
    throw std::runtime_error(path.string() + ": missing or unexpected header");
  std::vector<Event> events;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(number);
    const auto f = split(line, ',');
    if (f.size() != 7) throw std::runtime_error(where + ": expected 7 fields");
    Event e{};
    e.trial = to_number<int>(f[0], where);
    e.agent = to_number<int>(f[1], where);
    const auto kind = parse_event_kind(f[2]);
    if (!kind) throw std::runtime_error(where + ": unknown event '" + f[2] + "'");
    e.kind = *kind;
    e.goal = f[3];
    e.cost = to_number<int>(f[4], where);
    if (!f[5].empty()) {
      try {
        e.closeness = std::stod(f[5]);
      } catch (const std::exception&) {
        throw std::runtime_error(where + ": bad closeness '" + f[5] + "'");
      }
    }
    if (f[6] != "0" && f[6] != "1") throw std::runtime_error(where + ": bad accepted flag '" + f[6] + "'");
    e.accepted = f[6] == "1";
    if (e.trial < 1) throw std::runtime_error(where + ": trial must be positive");
    if (!events.empty() && e.trial < events.back().trial) throw std::runtime_error(where + ": trials out of order");
    events.push_back(std::move(e));
  }
  return events;
}

const ConditionAnalysis* AnalysisReport::condition(int group_size) const {
  for (const auto& c : conditions)
    if (c.group_size == group_size) return &c;
  return nullptr;
}

AnalysisReport analyze_directory(const fs::path& dir, std::span<const Metric> metrics) {
  AnalysisReport report;
  const auto rows = read_summary(dir / "summary.csv");

  std::map<int, std::vector<LoadedJob>> by_size;
  for (const auto& row : rows) {
    const std::string file = events_file_name(row.group_size, row.replication);
    LoadedJob job{row.group_size, row.replication, row.termination_trial, row.goals_met,
                  row.inventions, row.improvements, row.junk, {}};
    try {
      job.events = read_events_csv(dir / file);
      if (!job.events.empty() && job.events.back().trial > row.termination_trial)
        throw std::runtime_error("events beyond termination trial " + std::to_string(row.termination_trial));
      long junk_rows = 0;
      for (const auto& e : job.events) junk_rows += e.kind == EventKind::junk;
      if (junk_rows == 0 && row.junk > 0) {
        // Junk rows were suppressed; each agent without another event made junk.
        std::vector<int> per_trial(static_cast<std::size_t>(row.termination_trial) + 1, row.group_size);
        for (const auto& e : job.events)
          if (e.kind == EventKind::invention || e.kind == EventKind::improvement)
            --per_trial[static_cast<std::size_t>(e.trial)];
        std::vector<Event> merged;
        std::size_t next = 0;
        for (int t = 1; t <= row.termination_trial; ++t) {
          while (next < job.events.size() && job.events[next].trial == t) merged.push_back(job.events[next++]);
          for (int k = 0; k < per_trial[static_cast<std::size_t>(t)]; ++k)
            merged.push_back({t, -1, EventKind::junk, {}, 0, std::nullopt, false});
        }
        job.events = std::move(merged);
      }
      const auto total = [&](Metric m) {
        return static_cast<long>(cumulative(job.events, m, row.termination_trial).values.tail(1).sum());
      };
      if (row.termination_trial > 0 &&
          (total(Metric::goals) != row.goals_met || total(Metric::inventions) != row.inventions ||
           total(Metric::improvements) != row.improvements || total(Metric::junk) != row.junk))
        throw std::runtime_error("event totals disagree with summary.csv");
      by_size[row.group_size].push_back(std::move(job));
    } catch (const std::exception& e) {
      report.exclusions.emplace_back(file, e.what());
    }
  }

  for (auto& [size, jobs] : by_size) {
    ConditionAnalysis c;
    c.group_size = size;
    for (const auto& j : jobs) {
      c.replications.push_back(j.replication);
      c.mean_goals_met += static_cast<double>(j.goals_met);
      if (j.termination_trial > 0)
        c.mean_junk_per_trial += static_cast<double>(j.junk) / static_cast<double>(j.termination_trial);
    }
    c.mean_goals_met /= static_cast<double>(jobs.size());
    c.mean_junk_per_trial /= static_cast<double>(jobs.size());
    for (Metric m : metrics) {
      std::vector<CumulativeSeries> series;
      for (const auto& j : jobs) series.push_back(cumulative(j.events, m, j.termination_trial));
      c.average[m] = average_series(series);
    }
    report.conditions.push_back(std::move(c));
  }

  const ConditionAnalysis* size1 = report.condition(1);
  for (auto& c : report.conditions) {
    for (Metric m : metrics) {
      if (size1 != nullptr) c.baseline[m] = scale_baseline(size1->average.at(m), c.group_size);
      if (m != Metric::inventions && m != Metric::improvements) continue;
      try {
        c.fits[m] = fit_power(c.average.at(m));
      } catch (const FitError& e) {
        c.fit_errors[m] = e.what();
      }
    }
  }
  return report;
}

void write_report(const AnalysisReport& report, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::ostringstream fits;
  fits << "group_size,metric,status,a,b,rmse,nrmse,loglog_a,loglog_b,iterations\n";
  std::ostringstream comparison;
  comparison << "group_size,nrmse_inventions,nrmse_improvements\n";

  for (const auto& c : report.conditions) {
    const std::string g = "g" + std::to_string(c.group_size);
    for (const auto& [metric, series] : c.average) {
      std::ostringstream out;
      out << "trial,value\n";
      for (Eigen::Index t = 0; t < series.length(); ++t) out << t + 1 << ',' << fmt(series.values(t)) << '\n';
      write_file(out_dir / ("average_" + g + "_" + to_string(metric) + ".csv"), out.str());
    }
    for (const auto& [metric, predicted] : c.baseline) {
      const auto& observed = c.average.at(metric);
      std::ostringstream out;
      out << "trial,observed,predicted\n";
      const Eigen::Index n = std::min(observed.length(), predicted.length());
      for (Eigen::Index t = 0; t < n; ++t)
        out << t + 1 << ',' << fmt(observed.values(t)) << ',' << fmt(predicted.values(t)) << '\n';
      write_file(out_dir / ("baseline_" + g + "_" + to_string(metric) + ".csv"), out.str());
    }
    for (Metric m : {Metric::inventions, Metric::improvements}) {
      if (auto it = c.fits.find(m); it != c.fits.end()) {
        const auto& f = it->second;
        fits << c.group_size << ',' << to_string(m) << ",ok," << fmt(f.a) << ',' << fmt(f.b) << ',' << fmt(f.rmse)
             << ',' << fmt(f.nrmse) << ',' << fmt(f.loglog_a) << ',' << fmt(f.loglog_b) << ',' << f.iterations
             << '\n';
      } else if (auto e = c.fit_errors.find(m); e != c.fit_errors.end()) {
        fits << c.group_size << ',' << to_string(m) << ",undefined,,,,,,,\n";
      }
    }
    const auto inv = c.fits.find(Metric::inventions);
    const auto imp = c.fits.find(Metric::improvements);
    if (inv != c.fits.end() && imp != c.fits.end())
      comparison << c.group_size << ',' << fmt(inv->second.nrmse) << ',' << fmt(imp->second.nrmse) << '\n';
  }
  write_file(out_dir / "fits.csv", fits.str());
  write_file(out_dir / "nrmse_comparison.csv", comparison.str());

  std::ostringstream excl;
  excl << "file,reason\n";
  for (const auto& [file, reason] : report.exclusions) {
    std::string r = reason;
    std::replace(r.begin(), r.end(), ',', ';');
    excl << file << ',' << r << '\n';
  }
  write_file(out_dir / "exclusions.csv", excl.str());
}

}  // namespace nandevo
