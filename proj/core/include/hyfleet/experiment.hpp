#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hyfleet/hybrid.hpp"
#include "hyfleet/jobs.hpp"
#include "hyfleet/metrics.hpp"
#include "hyfleet/netmodel.hpp"
#include "hyfleet/scenario.hpp"

namespace hyfleet {

std::string_view library_version();

// Which planned tour feeds the network models.
struct NetSelection {
  std::uint32_t set = 0;
  std::optional<std::uint32_t> drones;  // default: largest swept count
  std::optional<bool> prioritized;  // default: prioritized if swept
};

struct ExperimentConfig {
  std::uint64_t seed = 42;
  std::optional<std::filesystem::path> scenario_path;  // otherwise generated from `grid`
  GridParams grid;
  std::optional<std::filesystem::path> jobs_path;  // otherwise generated from `jobs`
  JobParams jobs;
  FleetConfig fleet;
  std::vector<std::uint32_t> drone_counts{0, 1, 2, 3, 4, 5};
  std::vector<bool> prioritize{false, true};
  Solver solver = Solver::Heuristic;
  std::vector<std::string> net_models{"centralized", "csma", "sps"};
  NetSelection net;
  ChannelConfig channel;
  Milliseconds cam_period = 100.0;
  std::uint32_t cam_size = 190;
  std::uint32_t workers = 1;
  std::filesystem::path out_dir = "out";

  // Sets the base seed and the scenario and job generator seeds together.
  void reseed(std::uint64_t s);

  // Throws ConfigError describing the first problem found.
  void validate() const;
};

// Accepts either a config object or a run manifest carrying one under "config".
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
std::string dump_experiment_config(const ExperimentConfig& config);

struct RunKey {
  std::uint32_t set = 0;
  std::uint32_t drones = 0;
  bool prioritized = false;
  std::size_t config_index = 0;  // position in drone_counts x prioritize
  std::uint64_t seed = 0;
};

struct RunFailure {
  RunKey key;
  std::string message;
};

struct RunRecord {
  RunKey key;
  std::map<JobId, Seconds> completion;
  WaitingStats stats;
  Seconds makespan = 0.0;
  std::size_t sorties = 0;
};

struct ExperimentResult {
  ExperimentConfig config;  // as resolved, drones filled in
  std::vector<RunRecord> runs;  // ordered by (set, prioritized, drones)
  std::vector<RunFailure> failures;
  std::optional<SweepSummary> summary;  // absent when every run failed
  std::vector<NetStats> net;
  std::optional<RunKey> net_run;
  std::vector<DeliverySet> sets;

  int exit_code() const { return failures.empty() ? 0 : 1; }
};

// Seeds scenario and job generation from `config.seed` unless the config
// points at files. Config problems throw ConfigError; per-run failures are
// collected in the result.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Writes summary.csv, capacity.csv, runs.csv, completions.csv, the network
// CSVs and manifest.json into `dir`.
void write_experiment(const ExperimentResult& result, const std::filesystem::path& dir);

std::string runs_csv(const ExperimentResult& result);
std::string completions_csv(const ExperimentResult& result);
std::string dump_manifest(const ExperimentResult& result);

}  // namespace hyfleet
