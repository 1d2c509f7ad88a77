#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hyfleet/scenario.hpp"

namespace hyfleet {

using JobId = std::uint32_t;

enum class Category { Medical, Standard };

std::string_view to_string(Category c);
Category parse_category(std::string_view s);

struct DeliveryJob {
  JobId id = 0;
  BuildingId building = 0;
  Point target;  // the building's access point
  Category category = Category::Standard;

  friend bool operator==(const DeliveryJob&, const DeliveryJob&) = default;
};

struct DeliverySet {
  std::uint32_t id = 0;
  std::vector<DeliveryJob> jobs;
  // Set when the scenario had fewer buildings than requested jobs and
  // buildings were drawn with replacement.
  bool with_replacement = false;

  const DeliveryJob& job(JobId id) const;

  friend bool operator==(const DeliverySet&, const DeliverySet&) = default;
};

struct JobParams {
  std::uint32_t n_sets = 50;
  std::uint32_t per_set = 15;
  std::uint32_t medical_per_set = 5;
  std::uint64_t seed = 42;
};

std::vector<DeliverySet> generate_delivery_sets(const Scenario& scenario, const JobParams& params);

// All pairwise xy distances, ascending.
std::vector<Meters> ipd_distribution(std::span<const Point> points);

// Two-sample Kolmogorov-Smirnov statistic. Both inputs must be sorted.
double ks_statistic(std::span<const double> a, std::span<const double> b);

void save_delivery_sets(std::span<const DeliverySet> sets, const std::filesystem::path& path);
std::string dump_delivery_sets(std::span<const DeliverySet> sets);
// Targets are resolved against the scenario's buildings.
std::vector<DeliverySet> load_delivery_sets(const Scenario& scenario, const std::filesystem::path& path);
std::vector<DeliverySet> parse_delivery_sets(const Scenario& scenario, const std::string& text);

}  // namespace hyfleet
