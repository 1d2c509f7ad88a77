#include "hyfleet/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "hyfleet/errors.hpp"
#include "hyfleet/rng.hpp"
#include "hyfleet/simcore.hpp"
#include "json_util.hpp"
#include "serialization.hpp"

namespace hyfleet {

using detail::json;
using detail::Reader;

std::string_view library_version() { return "0.1.0"; }

void ExperimentConfig::reseed(std::uint64_t s) {
  seed = s;
  grid.seed = s;
  jobs.seed = s;
}

void ExperimentConfig::validate() const {
  auto bad = [](const std::string& msg) { throw ConfigError(msg); };
  try {
    fleet.validate();
    channel.validate();
  } catch (const ParameterError& e) {
    bad(e.what());
  }
  if (drone_counts.empty()) bad("drone_counts is empty");
  if (prioritize.empty()) bad("prioritize is empty");
  if (std::set<std::uint32_t>(drone_counts.begin(), drone_counts.end()).size() != drone_counts.size()) {
    bad("drone_counts has duplicates");
  }
  if (std::set<bool>(prioritize.begin(), prioritize.end()).size() != prioritize.size()) {
    bad("prioritize has duplicates");
  }
  if (*std::max_element(drone_counts.begin(), drone_counts.end()) > 64) bad("drone count above 64");
  if (!scenario_path) {
    if (grid.rows < 2 || grid.cols < 2) bad("grid needs at least 2 x 2 nodes");
    if (!(grid.spacing > 0.0)) bad("grid spacing must be positive");
  }
  if (!jobs_path) {
    if (jobs.n_sets == 0) bad("jobs.sets must be at least 1");
    if (jobs.per_set == 0) bad("jobs.per_set must be at least 1");
    if (jobs.medical_per_set > jobs.per_set) bad("jobs.medical_per_set exceeds jobs.per_set");
  }
  for (const std::string& m : net_models) {
    try {
      parse_mac(m);
    } catch (const Error&) {
      bad("unknown network model '" + m + "'");
    }
  }
  if (!(cam_period > 0.0)) bad("cam period must be positive");
  if (cam_size == 0) bad("cam size must be positive");
  if (workers == 0) bad("workers must be at least 1");
  if (net.drones && std::find(drone_counts.begin(), drone_counts.end(), *net.drones) == drone_counts.end()) {
    bad("net.drones is not among the swept drone counts");
  }
  if (net.prioritized && std::find(prioritize.begin(), prioritize.end(), *net.prioritized) == prioritize.end()) {
    bad("net.prioritized is not among the swept prioritize values");
  }
}

namespace {

json channel_to_json(const ChannelConfig& c) {
  return {{"los_exponent", c.los_exponent},
          {"nlos_exponent", c.nlos_exponent},
          {"ref_loss_db", c.ref_loss_db},
          {"tx_power_dbm", c.tx_power_dbm},
          {"loss_threshold_db", c.loss_threshold_db},
          {"logistic_width_db", c.logistic_width_db},
          {"carrier_sense_range_m", c.carrier_sense_range},
          {"vehicle_antenna_height_m", c.vehicle_antenna_height},
          {"ideal", c.ideal}};
}

ChannelConfig channel_from_json(const Reader& r) {
  ChannelConfig c;
  auto num = [&](const char* key, double& out) {
    if (r.has(key)) out = r.at(key).number();
  };
  num("los_exponent", c.los_exponent);
  num("nlos_exponent", c.nlos_exponent);
  num("ref_loss_db", c.ref_loss_db);
  num("tx_power_dbm", c.tx_power_dbm);
  num("loss_threshold_db", c.loss_threshold_db);
  num("logistic_width_db", c.logistic_width_db);
  num("carrier_sense_range_m", c.carrier_sense_range);
  num("vehicle_antenna_height_m", c.vehicle_antenna_height);
  if (r.has("ideal")) c.ideal = r.at("ideal").boolean();
  return c;
}

void reject_unknown(const Reader& r, std::initializer_list<const char*> known) {
  if (!r.node().is_object()) Reader::fail(r.path(), "expected an object");
  for (const auto& [key, value] : r.node().items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      Reader::fail(r.path().empty() ? key : r.path() + "." + key, "unknown field");
    }
  }
}

ExperimentConfig config_from_json(const Reader& r) {
  reject_unknown(r, {"seed", "scenario", "grid", "jobs", "jobs_file", "fleet", "drone_counts", "prioritize",
                     "solver", "net", "workers", "out"});
  ExperimentConfig c;
  if (r.has("seed")) c.reseed(r.at("seed").unsigned_int());
  if (r.has("scenario")) c.scenario_path = r.at("scenario").string();
  if (r.has("grid")) {
    Reader g = r.at("grid");
    reject_unknown(g, {"rows", "cols", "spacing_m", "buildings_per_cell", "seed"});
    if (g.has("rows")) c.grid.rows = g.at("rows").u32();
    if (g.has("cols")) c.grid.cols = g.at("cols").u32();
    if (g.has("spacing_m")) c.grid.spacing = g.at("spacing_m").number();
    if (g.has("buildings_per_cell")) c.grid.buildings_per_cell = g.at("buildings_per_cell").u32();
    if (g.has("seed")) c.grid.seed = g.at("seed").unsigned_int();
  }
  if (r.has("jobs")) {
    Reader j = r.at("jobs");
    reject_unknown(j, {"sets", "per_set", "medical_per_set", "seed"});
    if (j.has("sets")) c.jobs.n_sets = j.at("sets").u32();
    if (j.has("per_set")) c.jobs.per_set = j.at("per_set").u32();
    if (j.has("medical_per_set")) c.jobs.medical_per_set = j.at("medical_per_set").u32();
    if (j.has("seed")) c.jobs.seed = j.at("seed").unsigned_int();
  }
  if (r.has("jobs_file")) c.jobs_path = r.at("jobs_file").string();
  if (r.has("fleet")) {
    Reader f = r.at("fleet");
    reject_unknown(f, {"truck_speed_mps", "truck_service_s", "drone_count", "drone_speed_mps", "drone_endurance_s",
                       "drone_service_s", "turnaround_s", "drone_altitude_m"});
    c.fleet = detail::fleet_from_json(f);
  }
  if (r.has("drone_counts")) {
    Reader d = r.at("drone_counts");
    c.drone_counts.clear();
    for (std::size_t i = 0; i < d.array_size(); ++i) c.drone_counts.push_back(d.at(i).u32());
  }
  if (r.has("prioritize")) {
    Reader p = r.at("prioritize");
    c.prioritize.clear();
    for (std::size_t i = 0; i < p.array_size(); ++i) c.prioritize.push_back(p.at(i).boolean());
  }
  if (r.has("solver")) {
    try {
      c.solver = parse_solver(r.at("solver").string());
    } catch (const ParameterError& e) {
      Reader::fail(r.path() + "solver", e.what());
    }
  }
  if (r.has("net")) {
    Reader n = r.at("net");
    reject_unknown(n, {"models", "set", "drones", "prioritized", "period_ms", "size_bytes", "channel"});
    if (n.has("models")) {
      Reader m = n.at("models");
      c.net_models.clear();
      for (std::size_t i = 0; i < m.array_size(); ++i) c.net_models.push_back(m.at(i).string());
    }
    if (n.has("set")) c.net.set = n.at("set").u32();
    if (n.has("drones") && !n.at("drones").node().is_null()) c.net.drones = n.at("drones").u32();
    if (n.has("prioritized") && !n.at("prioritized").node().is_null()) {
      c.net.prioritized = n.at("prioritized").boolean();
    }
    if (n.has("period_ms")) c.cam_period = n.at("period_ms").number();
    if (n.has("size_bytes")) c.cam_size = n.at("size_bytes").u32();
    if (n.has("channel")) c.channel = channel_from_json(n.at("channel"));
  }
  if (r.has("workers")) c.workers = r.at("workers").u32();
  if (r.has("out")) c.out_dir = r.at("out").string();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["seed"] = c.seed;
  if (c.scenario_path) {
    j["scenario"] = c.scenario_path->generic_string();
  } else {
    j["grid"] = {{"rows", c.grid.rows},
                 {"cols", c.grid.cols},
                 {"spacing_m", c.grid.spacing},
                 {"buildings_per_cell", c.grid.buildings_per_cell},
                 {"seed", c.grid.seed}};
  }
  if (c.jobs_path) {
    j["jobs_file"] = c.jobs_path->generic_string();
  } else {
    j["jobs"] = {{"sets", c.jobs.n_sets},
                 {"per_set", c.jobs.per_set},
                 {"medical_per_set", c.jobs.medical_per_set},
                 {"seed", c.jobs.seed}};
  }
  j["fleet"] = detail::fleet_to_json(c.fleet);
  j["drone_counts"] = c.drone_counts;
  j["prioritize"] = c.prioritize;
  j["solver"] = std::string(to_string(c.solver));
  json net = {{"models", c.net_models},
              {"set", c.net.set},
              {"period_ms", c.cam_period},
              {"size_bytes", c.cam_size},
              {"channel", channel_to_json(c.channel)}};
  net["drones"] = c.net.drones ? json(*c.net.drones) : json(nullptr);
  net["prioritized"] = c.net.prioritized ? json(*c.net.prioritized) : json(nullptr);
  j["net"] = std::move(net);
  j["workers"] = c.workers;
  j["out"] = c.out_dir.generic_string();
  return j;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
  try {
    const json doc = detail::parse_json_text(text, "config");
    const Reader root(doc, "");
    if (root.has("config")) return config_from_json(root.at("config"));
    return config_from_json(root);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = detail::read_text_file(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return parse_experiment_config(text);
}

std::string dump_experiment_config(const ExperimentConfig& config) { return config_to_json(config).dump(2) + "\n"; }

namespace {

struct Unit {
  std::uint32_t set = 0;
  bool prioritized = false;
};

struct UnitOutput {
  std::vector<RunRecord> runs;
  std::vector<RunFailure> failures;
  std::optional<DeliveryTrace> net_trace;
};

class Sweep {
 public:
  Sweep(const ExperimentConfig& cfg, const Scenario& scenario, const std::vector<DeliverySet>& sets)
      : cfg_(cfg), scenario_(scenario), sets_(sets) {
    drones_ = cfg.drone_counts;
    std::sort(drones_.begin(), drones_.end());
  }

  std::size_t config_index(std::uint32_t drones, bool prioritized) const {
    const auto d = std::find(cfg_.drone_counts.begin(), cfg_.drone_counts.end(), drones) - cfg_.drone_counts.begin();
    const auto p = std::find(cfg_.prioritize.begin(), cfg_.prioritize.end(), prioritized) - cfg_.prioritize.begin();
    return static_cast<std::size_t>(d) * cfg_.prioritize.size() + static_cast<std::size_t>(p);
  }

  RunKey key(std::uint32_t set, std::uint32_t drones, bool prioritized) const {
    RunKey k{set, drones, prioritized, config_index(drones, prioritized), 0};
    k.seed = derive_seed(cfg_.seed, {set, k.config_index});
    return k;
  }

  UnitOutput run(const Unit& u) const {
    UnitOutput out;
    const DeliverySet& set = sets_[u.set];
    std::vector<HybridPlan> series;
    try {
      series = plan_hybrid_series(scenario_, set, cfg_.fleet, u.prioritized, drones_.back(), cfg_.solver);
    } catch (const std::exception& e) {
      for (std::uint32_t d : drones_) out.failures.push_back({key(u.set, d, u.prioritized), e.what()});
      return out;
    }
    for (std::uint32_t d : drones_) {
      const RunKey k = key(u.set, d, u.prioritized);
      try {
        const HybridPlan& plan = series.at(d);
        DeliveryTrace trace = simulate(scenario_, plan, plan.fleet);
        RunRecord rec;
        rec.key = k;
        rec.completion = trace.completion;
        rec.stats = waiting_stats(trace, set);
        rec.makespan = trace.end_time;
        rec.sorties = plan.sorties.size();
        out.runs.push_back(std::move(rec));
        if (u.set == cfg_.net.set && d == *cfg_.net.drones && u.prioritized == *cfg_.net.prioritized) {
          out.net_trace = std::move(trace);
        }
      } catch (const std::exception& e) {
        out.failures.push_back({k, e.what()});
      }
    }
    return out;
  }

 private:
  const ExperimentConfig& cfg_;
  const Scenario& scenario_;
  const std::vector<DeliverySet>& sets_;
  std::vector<std::uint32_t> drones_;
};

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& input) {
  ExperimentResult result;
  result.config = input;
  ExperimentConfig& cfg = result.config;
  if (!cfg.net.drones && !cfg.drone_counts.empty()) cfg.net.drones = *std::max_element(cfg.drone_counts.begin(), cfg.drone_counts.end());
  if (!cfg.net.prioritized && !cfg.prioritize.empty()) {
    cfg.net.prioritized = std::find(cfg.prioritize.begin(), cfg.prioritize.end(), true) != cfg.prioritize.end();
  }
  cfg.validate();

  Scenario scenario;
  try {
    scenario = cfg.scenario_path ? load_scenario(*cfg.scenario_path) : generate_grid_scenario(cfg.grid);
    result.sets = cfg.jobs_path ? load_delivery_sets(scenario, *cfg.jobs_path)
                                : generate_delivery_sets(scenario, cfg.jobs);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (result.sets.empty()) throw ConfigError("no delivery sets");
  for (std::size_t i = 0; i < result.sets.size(); ++i) {
    if (result.sets[i].id != i) throw ConfigError("delivery set ids must be 0..n-1 in order");
  }
  if (cfg.net.set >= result.sets.size()) throw ConfigError("net.set is out of range");

  std::vector<Unit> units;
  for (std::uint32_t s = 0; s < result.sets.size(); ++s) {
    for (bool p : {false, true}) {
      if (std::find(cfg.prioritize.begin(), cfg.prioritize.end(), p) != cfg.prioritize.end()) units.push_back({s, p});
    }
  }

  const Sweep sweep(cfg, scenario, result.sets);
  std::vector<UnitOutput> outputs(units.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < units.size(); i = next++) outputs[i] = sweep.run(units[i]);
  };
  const std::size_t n_workers = std::min<std::size_t>(cfg.workers, units.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  std::optional<DeliveryTrace> net_trace;
  for (UnitOutput& o : outputs) {
    for (RunRecord& r : o.runs) result.runs.push_back(std::move(r));
    for (RunFailure& f : o.failures) result.failures.push_back(std::move(f));
    if (o.net_trace) net_trace = std::move(o.net_trace);
  }

  if (!result.runs.empty()) {
    SweepResult sr;
    for (const RunRecord& r : result.runs) {
      sr.rows.push_back({r.key.drones, r.key.prioritized, r.key.set, r.stats, r.makespan});
    }
    result.summary = summarize_sweep(sr);
  }

  if (net_trace && !cfg.net_models.empty()) {
    result.net_run = sweep.key(cfg.net.set, *cfg.net.drones, *cfg.net.prioritized);
    CamParams cam;
    cam.period = cfg.cam_period;
    cam.size_bytes = cfg.cam_size;
    cam.seed = result.net_run->seed;
    for (const std::string& m : cfg.net_models) {
      try {
        result.net.push_back(run_cam_traffic(*net_trace, scenario, parse_mac(m), cfg.channel, cam));
      } catch (const std::exception& e) {
        result.failures.push_back({*result.net_run, m + ": " + e.what()});
      }
    }
  }
  return result;
}

std::string runs_csv(const ExperimentResult& result) {
  std::ostringstream out;
  out << "set,drones,prioritized,seed,sorties,mean_s,median_s,makespan_s\n";
  for (const RunRecord& r : result.runs) {
    out << r.key.set << ',' << r.key.drones << ',' << (r.key.prioritized ? 1 : 0) << ',' << r.key.seed << ','
        << r.sorties << ',' << format_number(r.stats.all.mean) << ',' << format_number(r.stats.all.median) << ','
        << format_number(r.makespan) << '\n';
  }
  return out.str();
}

std::string completions_csv(const ExperimentResult& result) {
  std::ostringstream out;
  out << "set,drones,prioritized,job,category,completion_s\n";
  for (const RunRecord& r : result.runs) {
    const DeliverySet& set = result.sets.at(r.key.set);
    for (const auto& [job, t] : r.completion) {
      out << r.key.set << ',' << r.key.drones << ',' << (r.key.prioritized ? 1 : 0) << ',' << job << ','
          << to_string(set.job(job).category) << ',' << format_number(t) << '\n';
    }
  }
  return out.str();
}

namespace {

json key_json(const RunKey& k) {
  return {{"set", k.set}, {"drones", k.drones}, {"prioritized", k.prioritized}, {"seed", k.seed}};
}

}  // namespace

std::string dump_manifest(const ExperimentResult& result) {
  json m;
  m["version"] = std::string(library_version());
  m["config"] = config_to_json(result.config);
  m["runs"] = result.runs.size();
  json seeds = json::array();
  for (const RunRecord& r : result.runs) seeds.push_back(key_json(r.key));
  m["seeds"] = std::move(seeds);
  json failures = json::array();
  for (const RunFailure& f : result.failures) {
    json j = key_json(f.key);
    j["error"] = f.message;
    failures.push_back(std::move(j));
  }
  m["failures"] = std::move(failures);
  if (result.net_run) m["net_run"] = key_json(*result.net_run);
  if (result.net.empty()) {
    m["requirements"] = json::array();
  } else {
    json req = json::array();
    for (const NetStats& s : result.net) {
      if (s.messages.empty()) continue;
      const RequirementsReport r = check_requirements(s);
      req.push_back({{"model", s.model},
                     {"p95_latency_ms", r.p95_latency},
                     {"pdr", r.pdr},
                     {"cc_latency_ok", r.cc_latency_ok},
                     {"pdr_ok", r.pdr_ok},
                     {"drone_delivery_latency_ok", r.drone_delivery_latency_ok}});
    }
    m["requirements"] = std::move(req);
  }
  return m.dump(2) + "\n";
}

void write_experiment(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  if (result.summary) {
    detail::write_text_file(dir / "summary.csv", summary_csv(*result.summary));
    detail::write_text_file(dir / "capacity.csv", capacity_csv(*result.summary));
  }
  detail::write_text_file(dir / "runs.csv", runs_csv(result));
  detail::write_text_file(dir / "completions.csv", completions_csv(result));
  if (!result.net.empty()) {
    detail::write_text_file(dir / "net_results.csv", net_results_csv(result.net));
    detail::write_text_file(dir / "net_summary.csv", net_summary_csv(result.net));
  }
  detail::write_text_file(dir / "manifest.json", dump_manifest(result));
}

}  // namespace hyfleet
