#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hyfleet/jobs.hpp"
#include "hyfleet/simcore.hpp"

namespace hyfleet {

struct CategoryStats {
  std::vector<Seconds> samples;  // ascending
  Seconds mean = 0.0;
  Seconds median = 0.0;
  std::size_t n = 0;
};

// Waiting time is measured from tour start (t = 0).
struct WaitingStats {
  std::optional<CategoryStats> medical;  // absent when the set has no such job
  std::optional<CategoryStats> standard;
  CategoryStats all;
};

CategoryStats category_stats(std::vector<Seconds> samples);

WaitingStats waiting_stats(const std::map<JobId, Seconds>& completion, const DeliverySet& set);
WaitingStats waiting_stats(const DeliveryTrace& trace, const DeliverySet& set);

// Fraction of all samples at or below `threshold`.
double capacity_at(const WaitingStats& stats, Seconds threshold);
double capacity_at(const CategoryStats& stats, Seconds threshold);

struct PrioritizationEffect {
  double medical_change = 0.0;  // (prio - base) / base; negative is faster
  double standard_change = 0.0;
};

PrioritizationEffect prioritization_effect(const WaitingStats& base, const WaitingStats& prio);

struct SweepRow {
  std::uint32_t drones = 0;
  bool prioritized = false;
  std::uint32_t set_id = 0;
  WaitingStats stats;
  Seconds makespan = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

enum class StatCategory { Medical, Standard, All };
std::string_view to_string(StatCategory c);

struct SummaryRow {
  std::uint32_t drones = 0;
  bool prioritized = false;
  StatCategory category = StatCategory::All;
  std::size_t sets = 0;
  Seconds mean = 0.0;    // mean over sets of the per-set mean
  Seconds median = 0.0;  // mean over sets of the per-set median
  double capacity_20min = 0.0;
  Seconds makespan = 0.0;
};

struct CapacityPoint {
  std::uint32_t drones = 0;
  bool prioritized = false;
  std::uint32_t minute = 0;
  double capacity = 0.0;  // all deliveries, averaged over sets
};

struct SweepSummary {
  std::vector<SummaryRow> rows;  // ordered by (drones, prioritized, category)
  std::vector<CapacityPoint> capacity_curve;

  const SummaryRow* find(std::uint32_t drones, bool prioritized, StatCategory category) const;
};

inline constexpr Seconds kCapacityThreshold = 20.0 * 60.0;

SweepSummary summarize_sweep(const SweepResult& results);

// drones,prioritized,category,mean_s,median_s,capacity_20min
std::string summary_csv(const SweepSummary& summary);
// drones,prioritized,minute,capacity
std::string capacity_csv(const SweepSummary& summary);

}  // namespace hyfleet
