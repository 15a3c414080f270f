#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nandevo/engine.hpp"

namespace nandevo {

inline constexpr const char* kVersion = "nandevo 1.0.0";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything that determines an experiment's output files.
///
/// Config-file keys and CLI flags share names: group-sizes, replications,
/// max-trials, seed, p-const, p-nand, min-components, max-components,
/// input-cap, out, jobs, write-junk, keep-drafts, max-pool-size.
struct ExperimentConfig {
  std::vector<int> group_sizes{1, 2, 4, 8};
  int replications = 20;
  int max_trials = 100000;
  std::uint64_t master_seed = 1;
  ComposeParams compose;
  std::filesystem::path out_dir = "results";
  int jobs = 0;  ///< concurrent jobs; 0 picks the hardware parallelism
  bool write_junk = true;
  bool keep_drafts = false;
  std::size_t max_pool_size = 0;
};

/// Sets one key from its text value. Underscores in the key are accepted in
/// place of dashes. Throws ConfigError on unknown keys or bad values.
void apply_setting(ExperimentConfig& config, std::string key, const std::string& value);

/// Reads `key = value` lines; blank lines and `#` comments are skipped.
void load_config(ExperimentConfig& config, std::istream& in, const std::string& origin = "config");
void load_config_file(ExperimentConfig& config, const std::filesystem::path& path);

/// Throws ConfigError describing the first violated constraint.
void validate(const ExperimentConfig& config);

/// Config echo as `key = value` lines, loadable by load_config. `jobs` is
/// not part of it since it never affects results.
std::string to_config_text(const ExperimentConfig& config);

EngineParams engine_params(const ExperimentConfig& config, int group_size);

/// Per-job seed: splitmix64 applied to the master seed, then to the result
/// xor-ed with the group size, then xor-ed with the replication index.
/// Each step is a bijection, so jobs of one master seed never collide.
std::uint64_t derive_seed(std::uint64_t master_seed, int group_size, int replication) noexcept;

std::string job_name(int group_size, int replication);
std::string events_file_name(int group_size, int replication);

/// Header `trial,agent,event,goal,cost,closeness,accepted`.
void write_events_csv(std::ostream& out, std::span<const Event> events, bool write_junk = true);

struct JobResult {
  int group_size = 0;
  int replication = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  ReplicationSummary summary;
};

struct ExperimentOutcome {
  std::vector<JobResult> jobs;  ///< ordered by (group size, replication)
  bool all_ok() const;
};

/// Runs one (group size, replication) job and writes its events file.
JobResult run_job(const ExperimentConfig& config, int group_size, int replication);

/// Runs every job with bounded parallelism, then writes summary.csv and
/// manifest.txt. Failed jobs are recorded and do not stop the others.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

}  // namespace nandevo
