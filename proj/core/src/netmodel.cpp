#include "hyfleet/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

#include "hyfleet/errors.hpp"
#include "hyfleet/rng.hpp"

namespace hyfleet {
namespace {

// Stream tags keep the random draws of different purposes independent.
enum Stream : std::uint64_t { kChannel = 1, kPhase = 2, kGrant = 3, kBackoff = 4, kSps = 5 };

double hashed_uniform(std::uint64_t seed, std::initializer_list<std::uint64_t> key) {
  return static_cast<double>(derive_seed(seed, key) >> 11) * 0x1.0p-53;
}

// One CAM opportunity: drone `drone` in CAM period `period`.
struct Opportunity {
  DroneId drone;
  std::int64_t period;
  Seconds gen;
};

Point drone_pos(const DeliveryTrace& trace, DroneId d, Seconds t) { return position_at(trace, drone_vehicle(d), t); }

Point truck_antenna(const DeliveryTrace& trace, const ChannelConfig& cfg, Seconds t) {
  Point p = position_at(trace, kTruck, std::clamp(t, 0.0, trace.end_time));
  p.z = cfg.vehicle_antenna_height;
  return p;
}

// Frame success on a direct link using the common per-(sender, period, hop) draw.
bool hop_succeeds(const Scenario& sc, const ChannelConfig& cfg, std::uint64_t seed, const Opportunity& o,
                  std::uint64_t hop, const Point& from, const Point& to, bool& los) {
  los = !los_blocked(sc, from, to);
  const double p = link_success_probability(cfg, from, to, los);
  const double u = hashed_uniform(seed, {kChannel, o.drone, static_cast<std::uint64_t>(o.period), hop});
  return u < p;
}

// CAMs at a fixed per-drone phase within each period while airborne.
std::vector<Opportunity> phased_opportunities(const DeliveryTrace& trace, const CamParams& params) {
  const Seconds period = params.period / 1000.0;
  std::vector<Opportunity> out;
  for (DroneId d = 0; d < trace.drone_count(); ++d) {
    const Seconds phase = hashed_uniform(params.seed, {kPhase, d}) * period;
    for (const Flight& f : trace.flights[d]) {
      auto k = static_cast<std::int64_t>(std::ceil((f.launch - phase) / period));
      for (;; ++k) {
        const Seconds gen = static_cast<double>(k) * period + phase;
        if (gen < f.launch) continue;
        if (gen >= f.land) break;
        out.push_back({d, k, gen});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Opportunity& a, const Opportunity& b) {
    return a.gen != b.gen ? a.gen < b.gen : a.drone < b.drone;
  });
  return out;
}

NetStats run_centralized(const DeliveryTrace& trace, const Scenario& sc, const CentralizedMac& mac,
                         const ChannelConfig& cfg, const CamParams& params) {
  NetStats stats;
  stats.model = "centralized";
  std::vector<std::uint64_t> seq(trace.drone_count(), 0);
  for (const Opportunity& o : phased_opportunities(trace, params)) {
    const Milliseconds grant =
        mac.grant_period * hashed_uniform(params.seed, {kGrant, o.drone, static_cast<std::uint64_t>(o.period)});
    const Seconds uplink_at = o.gen + grant / 1000.0;
    const Seconds downlink_at = o.gen + (grant + mac.airtime + mac.processing + mac.backhaul + mac.processing) / 1000.0;

    const Point drone = drone_pos(trace, o.drone, std::min(uplink_at, trace.end_time));
    bool los_up = true;
    bool los_down = true;
    const bool up = hop_succeeds(sc, cfg, params.seed, o, 0, drone, sc.base_station, los_up);
    const bool down =
        hop_succeeds(sc, cfg, params.seed, o, 1, sc.base_station, truck_antenna(trace, cfg, downlink_at), los_down);

    CamMessage m;
    m.seq = seq[o.drone]++;
    m.sender = drone_vehicle(o.drone);
    m.generated_at = o.gen;
    m.size = params.size_bytes;
    m.delivered = up && down;
    m.latency = grant + mac.processing + mac.backhaul + mac.processing + 2.0 * mac.airtime;
    m.los = los_up && los_down;
    stats.messages.push_back(m);
  }
  return stats;
}

NetStats run_csma(const DeliveryTrace& trace, const Scenario& sc, const CsmaMac& mac, const ChannelConfig& cfg,
                  const CamParams& params) {
  NetStats stats;
  stats.model = "csma";
  const Seconds slot = mac.slot_us * 1e-6;
  const Seconds aifs = mac.aifs_us * 1e-6;
  const Seconds airtime = mac.airtime / 1000.0;
  const std::vector<Opportunity> opps = phased_opportunities(trace, params);

  struct Pending {
    Seconds start;
    std::size_t index;
    std::uint32_t attempt;
  };
  auto later = [](const Pending& a, const Pending& b) {
    return a.start != b.start ? a.start > b.start : a.index > b.index;
  };
  std::priority_queue<Pending, std::vector<Pending>, decltype(later)> queue(later);
  auto backoff = [&](std::size_t index, std::uint32_t attempt) {
    const Opportunity& o = opps[index];
    const double u = hashed_uniform(params.seed, {kBackoff, o.drone, static_cast<std::uint64_t>(o.period), attempt});
    return static_cast<double>(static_cast<std::uint32_t>(u * (mac.contention_window + 1))) * slot;
  };
  for (std::size_t i = 0; i < opps.size(); ++i) queue.push({opps[i].gen + aifs + backoff(i, 0), i, 0});

  struct Tx {
    Seconds start;
    Seconds end;
    std::size_t index;
    Point pos;
  };
  std::vector<Tx> committed;  // in start order
  std::size_t horizon = 0;    // first committed tx that may still be on air
  while (!queue.empty()) {
    Pending p = queue.top();
    queue.pop();
    const Opportunity& o = opps[p.index];
    const Point pos = drone_pos(trace, o.drone, std::min(p.start, trace.end_time));
    while (horizon < committed.size() && committed[horizon].end + airtime < p.start) ++horizon;
    // A transmission is audible one slot after it starts.
    Seconds busy_until = -1.0;
    for (std::size_t k = horizon; k < committed.size(); ++k) {
      const Tx& tx = committed[k];
      if (tx.start <= p.start - slot && p.start < tx.end && opps[tx.index].drone != o.drone &&
          distance3d(tx.pos, pos) <= cfg.carrier_sense_range) {
        busy_until = std::max(busy_until, tx.end);
      }
    }
    if (busy_until >= 0.0) {
      queue.push({busy_until + aifs + backoff(p.index, p.attempt + 1), p.index, p.attempt + 1});
      continue;
    }
    committed.push_back({p.start, p.start + airtime, p.index, pos});
  }

  std::vector<char> collided(committed.size(), 0);
  for (std::size_t a = 0; a < committed.size(); ++a) {
    const Point rx_a = truck_antenna(trace, cfg, committed[a].start);
    for (std::size_t b = a + 1; b < committed.size() && committed[b].start < committed[a].end; ++b) {
      if (opps[committed[b].index].drone == opps[committed[a].index].drone) continue;
      const Point rx_b = truck_antenna(trace, cfg, committed[b].start);
      if (distance3d(committed[a].pos, rx_a) <= cfg.carrier_sense_range &&
          distance3d(committed[b].pos, rx_b) <= cfg.carrier_sense_range) {
        collided[a] = collided[b] = 1;
      }
    }
  }

  std::vector<CamMessage> by_opportunity(opps.size());
  for (std::size_t k = 0; k < committed.size(); ++k) {
    const Tx& tx = committed[k];
    const Opportunity& o = opps[tx.index];
    bool los = true;
    const bool ok = hop_succeeds(sc, cfg, params.seed, o, 0, tx.pos, truck_antenna(trace, cfg, tx.start), los);
    CamMessage& m = by_opportunity[tx.index];
    m.sender = drone_vehicle(o.drone);
    m.generated_at = o.gen;
    m.size = params.size_bytes;
    m.delivered = ok && !collided[k];
    m.latency = (tx.start - o.gen) * 1000.0 + mac.airtime;
    m.los = los;
  }
  std::vector<std::uint64_t> seq(trace.drone_count(), 0);
  for (CamMessage& m : by_opportunity) m.seq = seq[m.sender - 1]++;
  stats.messages = std::move(by_opportunity);
  return stats;
}

NetStats run_sps(const DeliveryTrace& trace, const Scenario& sc, const SpsMac& mac, const ChannelConfig& cfg,
                 const CamParams& params) {
  NetStats stats;
  stats.model = "sps";
  const Seconds period = params.period / 1000.0;
  const Seconds slot_len = mac.slot_length / 1000.0;
  const std::size_t drones = trace.drone_count();
  const auto periods = static_cast<std::int64_t>(std::ceil(trace.end_time / period)) + 1;

  struct Reservation {
    bool active = false;
    std::uint32_t slot = 0;
    std::uint32_t counter = 0;
  };
  std::vector<Reservation> res(drones);
  std::vector<std::uint64_t> seq(drones, 0);
  Rng rng(derive_seed(params.seed, {kSps}));

  struct Tx {
    DroneId drone;
    std::uint32_t slot;
    Point pos;
  };
  std::vector<Tx> previous;
  for (std::int64_t k = 0; k < periods; ++k) {
    const Seconds begin = static_cast<double>(k) * period;
    std::vector<Tx> current;
    for (DroneId d = 0; d < drones; ++d) {
      // Reservations are dropped while the drone rides the truck.
      const Flight* flight = nullptr;
      for (const Flight& f : trace.flights[d]) {
        if (f.land > begin && f.launch < begin + period) flight = &f;
      }
      if (flight == nullptr) {
        res[d].active = false;
        continue;
      }
      Reservation& r = res[d];
      bool select = !r.active;
      if (r.active && r.counter == 0) {
        if (rng.bernoulli(mac.reselect_probability)) {
          select = true;
        } else {
          r.counter = static_cast<std::uint32_t>(rng.between(mac.keep_min, mac.keep_max));
        }
      }
      if (select) {
        const Point here = drone_pos(trace, d, std::clamp(begin, flight->launch, flight->land));
        std::vector<char> busy(mac.slots, 0);
        for (const Tx& tx : previous) {
          if (tx.drone != d && distance3d(tx.pos, here) <= cfg.carrier_sense_range) busy[tx.slot] = 1;
        }
        std::vector<std::uint32_t> free_slots;
        for (std::uint32_t s = 0; s < mac.slots; ++s) {
          if (!busy[s]) free_slots.push_back(s);
        }
        if (mac.forced_slot) {
          r.slot = *mac.forced_slot;
        } else if (free_slots.empty()) {
          r.slot = static_cast<std::uint32_t>(rng.below(mac.slots));
        } else {
          r.slot = free_slots[rng.below(free_slots.size())];
        }
        r.counter = static_cast<std::uint32_t>(rng.between(mac.keep_min, mac.keep_max));
        r.active = true;
      }
      const Seconds at = begin + r.slot * slot_len;
      if (at < flight->launch || at >= flight->land) continue;
      --r.counter;
      current.push_back({d, r.slot, drone_pos(trace, d, at)});
    }

    for (const Tx& tx : current) {
      const Seconds at = begin + tx.slot * slot_len;
      const Point rx = truck_antenna(trace, cfg, at);
      bool collision = false;
      for (const Tx& other : current) {
        if (other.drone != tx.drone && other.slot == tx.slot &&
            distance3d(tx.pos, rx) <= cfg.carrier_sense_range &&
            distance3d(other.pos, rx) <= cfg.carrier_sense_range) {
          collision = true;
        }
      }
      bool los = true;
      const bool ok = hop_succeeds(sc, cfg, params.seed, {tx.drone, k, at}, 0, tx.pos, rx, los);
      CamMessage m;
      m.seq = seq[tx.drone]++;
      m.sender = drone_vehicle(tx.drone);
      m.generated_at = at;
      m.size = params.size_bytes;
      m.delivered = ok && !collision;
      m.latency = mac.airtime;
      m.los = los;
      stats.messages.push_back(m);
    }
    previous = std::move(current);
  }
  return stats;
}

std::string fmt(double v) { return format_number(v); }

}  // namespace

void ChannelConfig::validate() const {
  if (!(los_exponent > 0.0)) throw ParameterError("los_exponent must be > 0");
  if (nlos_exponent < los_exponent) throw ParameterError("nlos_exponent must be >= los_exponent");
  if (!(logistic_width_db > 0.0)) throw ParameterError("logistic_width_db must be > 0");
  if (!(carrier_sense_range > 0.0)) throw ParameterError("carrier_sense_range must be > 0");
}

double path_loss_db(const ChannelConfig& cfg, Meters distance, bool los) {
  const double n = los ? cfg.los_exponent : cfg.nlos_exponent;
  return cfg.ref_loss_db + 10.0 * n * std::log10(distance);
}

double link_success_probability(const ChannelConfig& cfg, const Point& a, const Point& b, bool los) {
  const Meters d = distance3d(a, b);
  if (cfg.ideal || d == 0.0) return 1.0;
  const double loss = path_loss_db(cfg, d, los);
  return 1.0 / (1.0 + std::exp((loss - cfg.loss_threshold_db) / cfg.logistic_width_db));
}

std::string mac_name(const MacModel& mac) {
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CentralizedMac>) return "centralized";
        else if constexpr (std::is_same_v<T, CsmaMac>) return "csma";
        else return "sps";
      },
      mac);
}

MacModel parse_mac(std::string_view name) {
  if (name == "centralized") return CentralizedMac{};
  if (name == "csma") return CsmaMac{};
  if (name == "sps") return SpsMac{};
  throw ParameterError("unknown MAC model '" + std::string(name) + "'");
}

std::uint64_t NetStats::delivered() const {
  return static_cast<std::uint64_t>(
      std::count_if(messages.begin(), messages.end(), [](const CamMessage& m) { return m.delivered; }));
}

double NetStats::pdr() const {
  if (messages.empty()) return 1.0;
  return static_cast<double>(delivered()) / static_cast<double>(sent());
}

std::vector<Milliseconds> NetStats::latencies() const {
  std::vector<Milliseconds> out;
  for (const CamMessage& m : messages) {
    if (m.delivered) out.push_back(m.latency);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::map<VehicleId, LinkStats> NetStats::per_link() const {
  std::map<VehicleId, LinkStats> out;
  for (const CamMessage& m : messages) {
    LinkStats& s = out[m.sender];
    ++s.sent;
    s.delivered += m.delivered ? 1 : 0;
    s.los += m.los ? 1 : 0;
  }
  return out;
}

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw ParameterError("quantile of an empty sample");
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - static_cast<double>(lo));
}

NetStats run_cam_traffic(const DeliveryTrace& trace, const Scenario& scenario, const MacModel& mac,
                         const ChannelConfig& cfg, const CamParams& params) {
  cfg.validate();
  if (trace.truck.empty()) throw ParameterError("run_cam_traffic needs a non-empty trace");
  if (!(params.period > 0.0) || params.size_bytes == 0) throw ParameterError("CAM period and size must be > 0");
  return std::visit(
      [&](const auto& m) -> NetStats {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CentralizedMac>) {
          if (m.grant_period < 0.0 || !(m.processing > 0.0) || !(m.backhaul > 0.0) || !(m.airtime > 0.0)) {
            throw ParameterError("centralized MAC parameters must be positive");
          }
          return run_centralized(trace, scenario, m, cfg, params);
        } else if constexpr (std::is_same_v<T, CsmaMac>) {
          if (!(m.slot_us > 0.0) || !(m.aifs_us > 0.0) || !(m.airtime > 0.0)) {
            throw ParameterError("CSMA parameters must be positive");
          }
          return run_csma(trace, scenario, m, cfg, params);
        } else {
          if (m.slots == 0 || !(m.slot_length > 0.0) || m.keep_min == 0 || m.keep_max < m.keep_min ||
              !(m.airtime > 0.0)) {
            throw ParameterError("SPS parameters must be positive");
          }
          if (std::abs(m.slots * m.slot_length - params.period) > 1e-9) {
            throw ParameterError("SPS slots x slot length must equal the CAM period");
          }
          if (m.forced_slot && *m.forced_slot >= m.slots) throw ParameterError("forced SPS slot out of range");
          return run_sps(trace, scenario, m, cfg, params);
        }
      },
      mac);
}

RequirementsReport check_requirements(const NetStats& stats, const RequirementsProfile& profile) {
  if (stats.messages.empty()) throw ParameterError("check_requirements on empty statistics");
  RequirementsReport r;
  const auto lat = stats.latencies();
  r.pdr = stats.pdr();
  r.p95_latency = lat.empty() ? std::numeric_limits<double>::infinity() : quantile(lat, 0.95);
  r.cc_latency_ok = r.p95_latency <= profile.cc_latency_bound;
  r.pdr_ok = r.pdr >= profile.pdr_target;
  r.drone_delivery_latency_ok = r.p95_latency <= profile.drone_delivery_latency;
  return r;
}

std::string net_results_csv(const std::vector<NetStats>& runs) {
  std::ostringstream out;
  out << "model,sender,seq,gen_time_s,delivered,latency_ms,los\n";
  for (const NetStats& s : runs) {
    for (const CamMessage& m : s.messages) {
      out << s.model << ',' << vehicle_name(m.sender) << ',' << m.seq << ',' << fmt(m.generated_at) << ','
          << (m.delivered ? 1 : 0) << ',';
      if (m.delivered) out << fmt(m.latency);
      out << ',' << (m.los ? 1 : 0) << '\n';
    }
  }
  return out.str();
}

std::string net_summary_csv(const std::vector<NetStats>& runs) {
  std::ostringstream out;
  out << "model,sent,delivered,pdr,lat_p50_ms,lat_p95_ms\n";
  for (const NetStats& s : runs) {
    const auto lat = s.latencies();
    out << s.model << ',' << s.sent() << ',' << s.delivered() << ',' << fmt(s.pdr()) << ',';
    if (!lat.empty()) out << fmt(quantile(lat, 0.5));
    out << ',';
    if (!lat.empty()) out << fmt(quantile(lat, 0.95));
    out << '\n';
  }
  return out.str();
}

}  // namespace hyfleet
