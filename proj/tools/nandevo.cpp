// Command-line front end: run, validate and analyze experiments.

#include <CLI11.hpp>

#include <array>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "nandevo/analysis.hpp"
#include "nandevo/experiment.hpp"

namespace {

constexpr std::array<const char*, 14> kKeys = {
    "group-sizes", "replications", "max-trials", "seed", "p-const", "p-nand", "min-components",
    "max-components", "input-cap", "out", "jobs", "write-junk", "keep-drafts", "max-pool-size"};

struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;

  void attach(CLI::App& cmd) {
    cmd.add_option("--config", config_path, "flat key = value config file")->check(CLI::ExistingFile);
    for (const char* key : kKeys) cmd.add_option(std::string("--") + key, values[key], "overrides config key " + std::string(key));
  }

  nandevo::ExperimentConfig build() const {
    nandevo::ExperimentConfig config;
    if (!config_path.empty()) nandevo::load_config_file(config, config_path);
    for (const char* key : kKeys)
      if (const auto& v = values.at(key); !v.empty()) nandevo::apply_setting(config, key, v);
    nandevo::validate(config);
    return config;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Open-ended NAND circuit evolution experiments"};
  app.set_version_flag("--version", nandevo::kVersion);
  app.require_subcommand(1);

  ConfigFlags run_flags;
  auto* run = app.add_subcommand("run", "run every (group size, replication) job");
  run_flags.attach(*run);

  ConfigFlags validate_flags;
  auto* validate = app.add_subcommand("validate", "check a config and print the resolved settings");
  validate_flags.attach(*validate);

  std::string in_dir, out_dir, metrics_arg;
  auto* analyze = app.add_subcommand("analyze", "turn an experiment directory into plot-ready CSVs");
  analyze->add_option("--in", in_dir, "experiment directory")->required()->check(CLI::ExistingDirectory);
  analyze->add_option("--out", out_dir, "output directory")->required();
  analyze->add_option("--metrics", metrics_arg, "comma-separated subset of goals,inventions,improvements,junk");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto config = run_flags.build();
      const auto outcome = nandevo::run_experiment(config);
      int failed = 0;
      for (const auto& j : outcome.jobs) {
        if (j.ok) continue;
        ++failed;
        std::cerr << nandevo::job_name(j.group_size, j.replication) << " failed: " << j.error << '\n';
      }
      std::cout << outcome.jobs.size() - static_cast<std::size_t>(failed) << " of " << outcome.jobs.size()
                << " jobs completed; results in " << config.out_dir.string() << '\n';
      return failed == 0 ? 0 : 3;
    }
    if (*validate) {
      const auto config = validate_flags.build();
      std::cout << nandevo::to_config_text(config);
      return 0;
    }
    if (*analyze) {
      std::vector<nandevo::Metric> metrics;
      if (metrics_arg.empty()) {
        metrics.assign(std::begin(nandevo::kAllMetrics), std::end(nandevo::kAllMetrics));
      } else {
        std::stringstream ss(metrics_arg);
        std::string name;
        while (std::getline(ss, name, ',')) metrics.push_back(nandevo::parse_metric(name));
      }
      const auto report = nandevo::analyze_directory(in_dir, metrics);
      nandevo::write_report(report, out_dir);
      for (const auto& [file, reason] : report.exclusions) std::cerr << "excluded " << file << ": " << reason << '\n';
      std::cout << "analyzed " << report.conditions.size() << " conditions into " << out_dir << '\n';
      return 0;
    }
  } catch (const nandevo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const nandevo::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
