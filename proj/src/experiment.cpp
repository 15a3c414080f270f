#include "nandevo/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace nandevo {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const std::string v = trim(value);
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty())
    throw ConfigError("invalid value '" + value + "' for " + key);
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw ConfigError("");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("invalid value '" + value + "' for " + key);
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("invalid value '" + value + "' for " + key);
}

std::string format_real(double v) {
  // Shortest text that reads back to the same double.
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write_atomically(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace

void apply_setting(ExperimentConfig& config, std::string key, const std::string& value) {
  std::replace(key.begin(), key.end(), '_', '-');
  key = trim(key);
  if (key == "group-sizes") {
    std::vector<int> sizes;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) sizes.push_back(parse_number<int>(key, item));
    config.group_sizes = std::move(sizes);
  } else if (key == "replications") {
    config.replications = parse_number<int>(key, value);
  } else if (key == "max-trials") {
    config.max_trials = parse_number<int>(key, value);
  } else if (key == "seed") {
    config.master_seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "p-const") {
    config.compose.p_const = parse_real(key, value);
  } else if (key == "p-nand") {
    config.compose.p_nand = parse_real(key, value);
  } else if (key == "min-components") {
    config.compose.min_components = parse_number<int>(key, value);
  } else if (key == "max-components") {
    config.compose.max_components = parse_number<int>(key, value);
  } else if (key == "input-cap") {
    config.compose.input_cap = parse_number<int>(key, value);
  } else if (key == "out") {
    config.out_dir = trim(value);
  } else if (key == "jobs") {
    config.jobs = parse_number<int>(key, value);
  } else if (key == "write-junk") {
    config.write_junk = parse_bool(key, value);
  } else if (key == "keep-drafts") {
    config.keep_drafts = parse_bool(key, value);
  } else if (key == "max-pool-size") {
    config.max_pool_size = parse_number<std::size_t>(key, value);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void load_config(ExperimentConfig& config, std::istream& in, const std::string& origin) {
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(number) + ": expected 'key = value'");
    try {
      apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

void load_config_file(ExperimentConfig& config, const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  load_config(config, in, path.string());
}

void validate(const ExperimentConfig& config) {
  if (config.group_sizes.empty()) throw ConfigError("group-sizes must list at least one size");
  for (int g : config.group_sizes)
    if (g < 1) throw ConfigError("group sizes must be positive");
  auto sorted = config.group_sizes;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ConfigError("group-sizes must not repeat");
  if (config.replications < 1) throw ConfigError("replications must be at least 1");
  if (config.max_trials < 1) throw ConfigError("max-trials must be at least 1");
  if (config.jobs < 0) throw ConfigError("jobs must be non-negative");
  try {
    validate(config.compose);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (config.out_dir.empty()) throw ConfigError("out must name a directory");
}

std::string to_config_text(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "group-sizes = ";
  for (std::size_t i = 0; i < c.group_sizes.size(); ++i) out << (i ? "," : "") << c.group_sizes[i];
  out << "\nreplications = " << c.replications << "\nmax-trials = " << c.max_trials << "\nseed = " << c.master_seed
      << "\np-const = " << format_real(c.compose.p_const) << "\np-nand = " << format_real(c.compose.p_nand)
      << "\nmin-components = " << c.compose.min_components << "\nmax-components = " << c.compose.max_components
      << "\ninput-cap = " << c.compose.input_cap << "\nout = " << c.out_dir.string()
      << "\nwrite-junk = " << (c.write_junk ? "true" : "false") << "\nkeep-drafts = " << (c.keep_drafts ? "true" : "false")
      << "\nmax-pool-size = " << c.max_pool_size << "\n";
  return out.str();
}

EngineParams engine_params(const ExperimentConfig& config, int group_size) {
  EngineParams p;
  p.compose = config.compose;
  p.group_size = group_size;
  p.max_trials = config.max_trials;
  p.keep_drafts = config.keep_drafts;
  p.max_pool_size = config.max_pool_size;
  return p;
}

std::uint64_t derive_seed(std::uint64_t master_seed, int group_size, int replication) noexcept {
  std::uint64_t h = splitmix64(master_seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(group_size));
  return splitmix64(h ^ static_cast<std::uint64_t>(replication));
}

std::string job_name(int group_size, int replication) {
  return "g" + std::to_string(group_size) + "_r" + std::to_string(replication);
}

std::string events_file_name(int group_size, int replication) {
  return job_name(group_size, replication) + ".events.csv";
}

void write_events_csv(std::ostream& out, std::span<const Event> events, bool write_junk) {
  out << "trial,agent,event,goal,cost,closeness,accepted\n";
  char closeness[40];
  for (const auto& e : events) {
    if (!write_junk && e.kind == EventKind::junk) continue;
    closeness[0] = '\0';
    if (e.closeness) std::snprintf(closeness, sizeof closeness, "%.9g", *e.closeness);
    out << e.trial << ',' << e.agent << ',' << to_string(e.kind) << ',' << e.goal << ',' << e.cost << ','
        << closeness << ',' << (e.accepted ? 1 : 0) << '\n';
  }
}

bool ExperimentOutcome::all_ok() const {
  return std::all_of(jobs.begin(), jobs.end(), [](const JobResult& j) { return j.ok; });
}

JobResult run_job(const ExperimentConfig& config, int group_size, int replication) {
  JobResult job;
  job.group_size = group_size;
  job.replication = replication;
  job.seed = derive_seed(config.master_seed, group_size, replication);
  try {
    ReplicationResult result = run_replication(engine_params(config, group_size), job.seed);
    std::ostringstream csv;
    write_events_csv(csv, result.events, config.write_junk);
    write_atomically(config.out_dir / events_file_name(group_size, replication), csv.str());
    job.summary = std::move(result.summary);
    job.ok = true;
  } catch (const std::bad_alloc&) {
    job.error = "out of memory";
  } catch (const std::exception& e) {
    job.error = e.what();
  }
  return job;
}

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
  validate(config);
  fs::create_directories(config.out_dir);

  auto sizes = config.group_sizes;
  std::sort(sizes.begin(), sizes.end());
  ExperimentOutcome outcome;
  for (int g : sizes)
    for (int r = 0; r < config.replications; ++r) {
      JobResult j;
      j.group_size = g;
      j.replication = r;
      outcome.jobs.push_back(j);
    }

  std::size_t workers = config.jobs > 0 ? static_cast<std::size_t>(config.jobs)
                                        : std::max<std::size_t>(1, std::thread::hardware_concurrency());
  workers = std::min(workers, outcome.jobs.size());

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < outcome.jobs.size(); i = next++)
      outcome.jobs[i] = run_job(config, outcome.jobs[i].group_size, outcome.jobs[i].replication);
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::ostringstream summary;
  summary << "group_size,replication,seed,termination_trial,goals_met,inventions,improvements,junk\n";
  for (const auto& j : outcome.jobs) {
    if (!j.ok) continue;
    const auto& s = j.summary;
    summary << j.group_size << ',' << j.replication << ',' << j.seed << ',' << s.termination_trial << ','
            << s.goals_met << ',' << s.inventions << ',' << s.improvements << ',' << s.junk << '\n';
  }
  write_atomically(config.out_dir / "summary.csv", summary.str());

  std::ostringstream manifest;
  manifest << "# " << kVersion << "\n[config]\n" << to_config_text(config) << "\n[jobs]\n";
  const auto goals = builtin_goals();
  for (const auto& j : outcome.jobs) {
    manifest << job_name(j.group_size, j.replication) << " seed=" << j.seed;
    if (!j.ok) {
      manifest << " status=failed error=\"" << j.error << "\"\n";
      continue;
    }
    const auto& s = j.summary;
    manifest << " status=ok termination_trial=" << s.termination_trial << " goals_met=" << s.goals_met
             << " inventions=" << s.inventions << " improvements=" << s.improvements << " junk=" << s.junk
             << " pool_size=" << s.pool_size << " replaced=" << s.replaced_count << " goal_costs=";
    for (std::size_t g = 0; g < s.goal_costs.size(); ++g) {
      if (g > 0) manifest << ',';
      manifest << goals[g].name << ':';
      if (s.goal_costs[g]) manifest << *s.goal_costs[g];
      else manifest << '-';
    }
    manifest << '\n';
  }
  write_atomically(config.out_dir / "manifest.txt", manifest.str());
  return outcome;
}

}  // namespace nandevo
