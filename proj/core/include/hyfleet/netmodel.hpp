#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hyfleet/scenario.hpp"
#include "hyfleet/simcore.hpp"

namespace hyfleet {

using Milliseconds = double;

// Log-distance path loss mapped to a delivery probability through a logistic
// curve centred on `loss_threshold_db`.
struct ChannelConfig {
  double los_exponent = 2.0;
  double nlos_exponent = 3.2;
  double ref_loss_db = 47.0;  // at 1 m
  double tx_power_dbm = 23.0;
  double loss_threshold_db = 125.0;
  double logistic_width_db = 4.0;
  Meters carrier_sense_range = 800.0;
  Meters vehicle_antenna_height = 1.5;  // truck antenna above ground
  bool ideal = false;                   // every link succeeds

  void validate() const;
};

double path_loss_db(const ChannelConfig& cfg, Meters distance, bool los);

// Probability that a single frame from a to b is received. Collocated
// endpoints always succeed.
double link_success_probability(const ChannelConfig& cfg, const Point& a, const Point& b, bool los);

// Base-station scheduled uplink then downlink (two radio hops).
struct CentralizedMac {
  Milliseconds grant_period = 10.0;  // uplink grant delay ~ U[0, grant_period]
  Milliseconds processing = 4.0;     // per hop
  Milliseconds backhaul = 10.0;
  Milliseconds airtime = 1.0;        // per hop
};

// Contention-based access with carrier sensing; no retransmissions.
struct CsmaMac {
  double slot_us = 13.0;
  double aifs_us = 58.0;
  std::uint32_t contention_window = 15;  // backoff ~ U{0..cw} slots
  Milliseconds airtime = 0.5;
};

// Sensing-based semi-persistent scheduling over a slotted period.
struct SpsMac {
  std::uint32_t slots = 100;
  Milliseconds slot_length = 1.0;
  std::uint32_t keep_min = 5;  // reservation counter ~ U{keep_min..keep_max} periods
  std::uint32_t keep_max = 15;
  double reselect_probability = 0.8;
  Milliseconds airtime = 1.0;
  std::optional<std::uint32_t> forced_slot;  // every selection picks this slot
};

using MacModel = std::variant<CentralizedMac, CsmaMac, SpsMac>;

std::string mac_name(const MacModel& mac);
// "centralized", "csma" or "sps" with default parameters.
MacModel parse_mac(std::string_view name);

struct CamMessage {
  std::uint64_t seq = 0;
  VehicleId sender = 0;
  Seconds generated_at = 0.0;
  std::uint32_t size = 190;
  bool delivered = false;
  Milliseconds latency = 0.0;  // meaningful when delivered
  bool los = true;             // every hop had line of sight
};

struct LinkStats {
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t los = 0;
};

struct NetStats {
  std::string model;
  std::vector<CamMessage> messages;

  std::uint64_t sent() const { return messages.size(); }
  std::uint64_t delivered() const;
  // delivered / sent; 1 when nothing was sent.
  double pdr() const;
  // Latencies of delivered messages, ascending.
  std::vector<Milliseconds> latencies() const;
  std::map<VehicleId, LinkStats> per_link() const;
};

// Linear-interpolation quantile of sorted samples, q in [0, 1].
double quantile(const std::vector<double>& sorted, double q);

struct CamParams {
  Milliseconds period = 100.0;
  std::uint32_t size_bytes = 190;
  std::uint64_t seed = 1;
};

// Periodic CAMs from every airborne drone to the truck, positions sampled
// from the trace at transmission instants.
NetStats run_cam_traffic(const DeliveryTrace& trace, const Scenario& scenario, const MacModel& mac,
                         const ChannelConfig& cfg, const CamParams& params);

struct RequirementsProfile {
  Milliseconds cc_latency_bound = 50.0;
  double cc_rate_min_kbps = 60.0;
  double cc_rate_max_kbps = 100.0;
  double cc_packet_error_rate = 1e-3;
  double pdr_target = 0.99;
  Milliseconds drone_delivery_latency = 500.0;
  double drone_delivery_dl_kbps = 300.0;
  double drone_delivery_ul_kbps = 200.0;
};

struct RequirementsReport {
  Milliseconds p95_latency = 0.0;
  double pdr = 0.0;
  bool cc_latency_ok = false;
  bool pdr_ok = false;
  bool drone_delivery_latency_ok = false;

  bool all_ok() const { return cc_latency_ok && pdr_ok && drone_delivery_latency_ok; }
};

RequirementsReport check_requirements(const NetStats& stats, const RequirementsProfile& profile = {});

// model,sender,seq,gen_time_s,delivered,latency_ms,los
std::string net_results_csv(const std::vector<NetStats>& runs);
// model,sent,delivered,pdr,lat_p50_ms,lat_p95_ms
std::string net_summary_csv(const std::vector<NetStats>& runs);

}  // namespace hyfleet
