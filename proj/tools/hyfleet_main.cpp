// hyfleet: scenario and job generation, planning, simulation, network
// evaluation and parameter sweeps. Every subcommand writes files under --out.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hyfleet/errors.hpp"
#include "hyfleet/experiment.hpp"
#include "hyfleet/hybrid.hpp"
#include "hyfleet/jobs.hpp"
#include "hyfleet/metrics.hpp"
#include "hyfleet/netmodel.hpp"
#include "hyfleet/scenario.hpp"
#include "hyfleet/simcore.hpp"
#include "report.hpp"

namespace fs = std::filesystem;
using namespace hyfleet;

namespace {

constexpr int kOk = 0;
constexpr int kRunFailure = 1;
constexpr int kConfigError = 2;

struct Common {
  std::optional<std::uint64_t> seed;
  fs::path out = "out";
  std::optional<fs::path> config;
  std::uint32_t workers = 1;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Base random seed");
  app->add_option("--out", c.out, "Output directory")->capture_default_str();
  app->add_option("--config", c.config, "JSON experiment config (or a run manifest)");
  app->add_option("--workers", c.workers, "Parallel workers")->check(CLI::PositiveNumber)->capture_default_str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

// Base config: --config file if given, defaults otherwise; --seed wins.
ExperimentConfig base_config(const Common& c) {
  ExperimentConfig cfg = c.config ? load_experiment_config(*c.config) : ExperimentConfig{};
  if (c.seed) cfg.reseed(*c.seed);
  return cfg;
}

Scenario input_scenario(const std::optional<fs::path>& path, const ExperimentConfig& cfg) {
  if (path) return load_scenario(*path);
  if (cfg.scenario_path) return load_scenario(*cfg.scenario_path);
  return generate_grid_scenario(cfg.grid);
}

std::vector<DeliverySet> input_jobs(const std::optional<fs::path>& path, const Scenario& scenario,
                                    const ExperimentConfig& cfg) {
  if (path) return load_delivery_sets(scenario, *path);
  if (cfg.jobs_path) return load_delivery_sets(scenario, *cfg.jobs_path);
  return generate_delivery_sets(scenario, cfg.jobs);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Truck and drone delivery fleet planner and simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(library_version()));

  Common common;

  // scenario gen | validate
  CLI::App* scenario_cmd = app.add_subcommand("scenario", "Generate or validate road/building scenarios");
  scenario_cmd->require_subcommand(1);
  CLI::App* scen_gen = scenario_cmd->add_subcommand("gen", "Generate a synthetic grid scenario");
  add_common(scen_gen, common);
  GridParams grid;
  std::optional<std::uint32_t> rows, cols, per_cell;
  std::optional<double> spacing;
  scen_gen->add_option("--rows", rows, "Grid rows (default 8)");
  scen_gen->add_option("--cols", cols, "Grid columns (default 8)");
  scen_gen->add_option("--spacing", spacing, "Block spacing in meters (default 100)");
  scen_gen->add_option("--buildings-per-cell", per_cell, "Buildings per block (default 2)");

  CLI::App* scen_val = scenario_cmd->add_subcommand("validate", "Check a scenario file");
  fs::path validate_path;
  scen_val->add_option("file", validate_path, "Scenario JSON")->required();

  // jobs gen
  CLI::App* jobs_cmd = app.add_subcommand("jobs", "Delivery set generation");
  jobs_cmd->require_subcommand(1);
  CLI::App* jobs_gen = jobs_cmd->add_subcommand("gen", "Sample delivery sets from a scenario");
  add_common(jobs_gen, common);
  std::optional<fs::path> scenario_path;
  std::optional<std::uint32_t> n_sets, per_set, medical;
  jobs_gen->add_option("--scenario", scenario_path, "Scenario JSON (default: generated grid)");
  jobs_gen->add_option("--sets", n_sets, "Number of sets (default 50)");
  jobs_gen->add_option("--per-set", per_set, "Jobs per set (default 15)");
  jobs_gen->add_option("--medical", medical, "Medical jobs per set (default 5)");

  // plan
  CLI::App* plan_cmd = app.add_subcommand("plan", "Plan one delivery set");
  add_common(plan_cmd, common);
  std::optional<fs::path> jobs_path;
  std::uint32_t set_index = 0;
  std::optional<std::uint32_t> drones;
  bool prioritize = false;
  std::optional<std::string> solver_name;
  plan_cmd->add_option("--scenario", scenario_path, "Scenario JSON (default: generated grid)");
  plan_cmd->add_option("--jobs", jobs_path, "Delivery sets JSON (default: generated)");
  plan_cmd->add_option("--set", set_index, "Set index")->capture_default_str();
  plan_cmd->add_option("--drones", drones, "Drone count");
  plan_cmd->add_flag("--prioritize", prioritize, "Serve medical deliveries first");
  plan_cmd->add_option("--solver", solver_name, "exact or heuristic");

  // simulate
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Execute a plan and record a trace");
  add_common(sim_cmd, common);
  fs::path plan_path;
  sim_cmd->add_option("--scenario", scenario_path, "Scenario JSON (default: generated grid)");
  sim_cmd->add_option("--plan", plan_path, "Plan JSON")->required();

  // netsim
  CLI::App* net_cmd = app.add_subcommand("netsim", "Run CAM traffic over a recorded trace");
  add_common(net_cmd, common);
  fs::path trace_path;
  std::vector<std::string> models;
  net_cmd->add_option("--scenario", scenario_path, "Scenario JSON (default: generated grid)");
  net_cmd->add_option("--trace", trace_path, "Trace JSON")->required();
  net_cmd->add_option("--model", models, "centralized, csma, sps (repeatable; default all)");

  // sweep
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Full experiment over sets, drone counts and priorities");
  add_common(sweep_cmd, common);
  std::optional<std::vector<std::uint32_t>> sweep_drones;
  bool no_prioritize = false;
  bool only_prioritize = false;
  sweep_cmd->add_option("--sets", n_sets, "Number of delivery sets");
  sweep_cmd->add_option("--drones", sweep_drones, "Drone counts to sweep")->delimiter(',');
  auto* np = sweep_cmd->add_flag("--no-prioritize", no_prioritize, "Only unprioritized runs");
  sweep_cmd->add_flag("--prioritize-only", only_prioritize, "Only prioritized runs")->excludes(np);

  // report
  CLI::App* report_cmd = app.add_subcommand("report", "Summarize a sweep directory");
  fs::path report_dir = "out";
  report_cmd->add_option("--out", report_dir, "Sweep output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (scen_gen->parsed()) {
      ExperimentConfig cfg = base_config(common);
      if (rows) cfg.grid.rows = *rows;
      if (cols) cfg.grid.cols = *cols;
      if (spacing) cfg.grid.spacing = *spacing;
      if (per_cell) cfg.grid.buildings_per_cell = *per_cell;
      const Scenario s = generate_grid_scenario(cfg.grid);
      save_scenario(s, common.out / "scenario.json");
      std::cout << "wrote " << (common.out / "scenario.json").string() << " (" << s.graph.node_count()
                << " nodes, " << s.buildings.size() << " buildings)\n";
      return kOk;
    }
    if (scen_val->parsed()) {
      try {
        const Scenario s = load_scenario(validate_path);
        std::cout << validate_path.string() << ": ok (" << s.graph.node_count() << " nodes, "
                  << s.graph.edge_count() << " edges, " << s.buildings.size() << " buildings)\n";
        return kOk;
      } catch (const Error& e) {
        std::cerr << validate_path.string() << ": " << e.what() << '\n';
        return kRunFailure;
      }
    }
    if (jobs_gen->parsed()) {
      ExperimentConfig cfg = base_config(common);
      if (n_sets) cfg.jobs.n_sets = *n_sets;
      if (per_set) cfg.jobs.per_set = *per_set;
      if (medical) cfg.jobs.medical_per_set = *medical;
      if (cfg.jobs.medical_per_set > cfg.jobs.per_set) throw ConfigError("--medical exceeds --per-set");
      const Scenario s = input_scenario(scenario_path, cfg);
      const auto sets = generate_delivery_sets(s, cfg.jobs);
      save_delivery_sets(sets, common.out / "jobs.json");
      std::cout << "wrote " << sets.size() << " sets to " << (common.out / "jobs.json").string() << '\n';
      return kOk;
    }
    if (plan_cmd->parsed()) {
      ExperimentConfig cfg = base_config(common);
      if (drones) cfg.fleet.drone_count = *drones;
      if (solver_name) cfg.solver = parse_solver(*solver_name);
      cfg.fleet.validate();
      const Scenario s = input_scenario(scenario_path, cfg);
      const auto sets = input_jobs(jobs_path, s, cfg);
      if (set_index >= sets.size()) throw ConfigError("--set is out of range");
      const HybridPlan plan = plan_hybrid(s, sets[set_index], cfg.fleet, prioritize, cfg.solver);
      save_plan(plan, common.out / "plan.json");
      std::cout << "set " << set_index << ": " << plan.truck.stops.size() << " truck stops, " << plan.sorties.size()
                << " sorties, total waiting " << plan.total_waiting() << " s\n";
      return kOk;
    }
    if (sim_cmd->parsed()) {
      const ExperimentConfig cfg = base_config(common);
      const Scenario s = input_scenario(scenario_path, cfg);
      const HybridPlan plan = load_plan(plan_path);
      const DeliveryTrace trace = simulate(s, plan, plan.fleet);
      save_trace(trace, common.out / "trace.csv", common.out / "trace.json");
      std::cout << trace.events.size() << " events, tour ends at " << trace.end_time << " s\n";
      return kOk;
    }
    if (net_cmd->parsed()) {
      ExperimentConfig cfg = base_config(common);
      if (!models.empty()) cfg.net_models = models;
      const Scenario s = input_scenario(scenario_path, cfg);
      const DeliveryTrace trace = load_trace(trace_path);
      CamParams cam;
      cam.period = cfg.cam_period;
      cam.size_bytes = cfg.cam_size;
      cam.seed = cfg.seed;
      std::vector<NetStats> runs;
      for (const std::string& m : cfg.net_models) {
        runs.push_back(run_cam_traffic(trace, s, parse_mac(m), cfg.channel, cam));
      }
      write_file(common.out / "net_results.csv", net_results_csv(runs));
      write_file(common.out / "net_summary.csv", net_summary_csv(runs));
      std::cout << net_summary_csv(runs);
      return kOk;
    }
    if (sweep_cmd->parsed()) {
      ExperimentConfig cfg = base_config(common);
      if (n_sets) cfg.jobs.n_sets = *n_sets;
      if (sweep_drones) cfg.drone_counts = *sweep_drones;
      if (no_prioritize) cfg.prioritize = {false};
      if (only_prioritize) cfg.prioritize = {true};
      if (sweep_cmd->count("--workers") > 0 || !common.config) cfg.workers = common.workers;
      if (sweep_cmd->count("--out") > 0 || !common.config) cfg.out_dir = common.out;
      if (no_prioritize || only_prioritize) cfg.net.prioritized.reset();
      if (sweep_drones) cfg.net.drones.reset();
      const ExperimentResult result = run_experiment(cfg);
      write_experiment(result, cfg.out_dir);
      for (const RunFailure& f : result.failures) {
        std::cerr << "run set=" << f.key.set << " drones=" << f.key.drones << " prioritized=" << f.key.prioritized
                  << " failed: " << f.message << '\n';
      }
      std::cout << result.runs.size() << " runs, " << result.failures.size() << " failed; results in "
                << cfg.out_dir.string() << '\n';
      return result.exit_code();
    }
    if (report_cmd->parsed()) {
      std::ostringstream text;
      cli::write_report(report_dir, text);
      write_file(report_dir / "report.txt", text.str());
      std::cout << text.str();
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRunFailure;
  }
  return kOk;
}
