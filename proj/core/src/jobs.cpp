#include "hyfleet/jobs.hpp"

#include <algorithm>
#include <numeric>

#include "hyfleet/errors.hpp"
#include "hyfleet/rng.hpp"
#include "json_util.hpp"

namespace hyfleet {

std::string_view to_string(Category c) { return c == Category::Medical ? "medical" : "standard"; }

Category parse_category(std::string_view s) {
  if (s == "medical") return Category::Medical;
  if (s == "standard") return Category::Standard;
  throw ParseError("unknown category '" + std::string(s) + "'");
}

const DeliveryJob& DeliverySet::job(JobId id) const {
  for (const DeliveryJob& j : jobs) {
    if (j.id == id) return j;
  }
  throw ConsistencyError("set " + std::to_string(this->id) + " has no job " + std::to_string(id));
}

std::vector<DeliverySet> generate_delivery_sets(const Scenario& scenario, const JobParams& params) {
  if (scenario.buildings.empty()) throw ScenarioError("scenario has no buildings to deliver to");
  if (params.medical_per_set > params.per_set) {
    throw ParameterError("medical_per_set exceeds per_set");
  }
  const std::size_t n_buildings = scenario.buildings.size();
  std::vector<DeliverySet> sets;
  sets.reserve(params.n_sets);
  for (std::uint32_t s = 0; s < params.n_sets; ++s) {
    Rng rng(derive_seed(params.seed, {s}));
    DeliverySet set;
    set.id = s;
    set.with_replacement = n_buildings < params.per_set;

    std::vector<std::size_t> picks;
    if (set.with_replacement) {
      for (std::uint32_t k = 0; k < params.per_set; ++k) picks.push_back(rng.below(n_buildings));
    } else {
      // Partial Fisher-Yates.
      std::vector<std::size_t> pool(n_buildings);
      std::iota(pool.begin(), pool.end(), 0);
      for (std::uint32_t k = 0; k < params.per_set; ++k) {
        const std::size_t j = k + rng.below(n_buildings - k);
        std::swap(pool[k], pool[j]);
        picks.push_back(pool[k]);
      }
    }

    std::vector<std::size_t> slots(params.per_set);
    std::iota(slots.begin(), slots.end(), 0);
    std::vector<char> medical(params.per_set, 0);
    for (std::uint32_t k = 0; k < params.medical_per_set; ++k) {
      const std::size_t j = k + rng.below(params.per_set - k);
      std::swap(slots[k], slots[j]);
      medical[slots[k]] = 1;
    }

    for (std::uint32_t k = 0; k < params.per_set; ++k) {
      const Building& b = scenario.buildings[picks[k]];
      set.jobs.push_back({k, b.id, b.access_point, medical[k] ? Category::Medical : Category::Standard});
    }
    sets.push_back(std::move(set));
  }
  return sets;
}

std::vector<Meters> ipd_distribution(std::span<const Point> points) {
  if (points.size() < 2) throw ParameterError("ipd_distribution needs at least 2 points");
  std::vector<Meters> d;
  d.reserve(points.size() * (points.size() - 1) / 2);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) d.push_back(distance2d(points[i], points[j]));
  }
  std::sort(d.begin(), d.end());
  return d;
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ParameterError("ks_statistic needs non-empty samples");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double sup = 0.0;
  // Walk the merged support; evaluate after consuming every copy of a value.
  while (i < a.size() || j < b.size()) {
    double v;
    if (j == b.size() || (i < a.size() && a[i] <= b[j])) {
      v = a[i];
    } else {
      v = b[j];
    }
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    sup = std::max(sup, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return sup;
}

using detail::json;
using detail::Reader;

std::string dump_delivery_sets(std::span<const DeliverySet> sets) {
  json doc = json::array();
  for (const DeliverySet& s : sets) {
    json jobs = json::array();
    for (const DeliveryJob& j : s.jobs) {
      jobs.push_back({{"id", j.id}, {"building", j.building}, {"category", std::string(to_string(j.category))}});
    }
    json entry = {{"id", s.id}, {"jobs", std::move(jobs)}};
    if (s.with_replacement) entry["with_replacement"] = true;
    doc.push_back(std::move(entry));
  }
  return doc.dump(1) + "\n";
}

void save_delivery_sets(std::span<const DeliverySet> sets, const std::filesystem::path& path) {
  detail::write_text_file(path, dump_delivery_sets(sets));
}

std::vector<DeliverySet> parse_delivery_sets(const Scenario& scenario, const std::string& text) {
  const json doc = detail::parse_json_text(text, "delivery sets");
  const Reader root(doc, "sets");
  std::vector<DeliverySet> sets;
  for (std::size_t i = 0; i < root.array_size(); ++i) {
    const Reader rs = root.at(i);
    DeliverySet set;
    set.id = rs.at("id").u32();
    if (rs.has("with_replacement")) set.with_replacement = rs.at("with_replacement").boolean();
    const Reader jobs = rs.at("jobs");
    for (std::size_t k = 0; k < jobs.array_size(); ++k) {
      const Reader rj = jobs.at(k);
      DeliveryJob job;
      job.id = rj.at("id").u32();
      job.building = rj.at("building").u32();
      try {
        job.category = parse_category(rj.at("category").string());
        job.target = scenario.building(job.building).access_point;
      } catch (const Error& e) {
        Reader::fail(rj.path(), e.what());
      }
      for (const DeliveryJob& other : set.jobs) {
        if (other.id == job.id) Reader::fail(rj.path() + ".id", "duplicate job id in set");
      }
      set.jobs.push_back(job);
    }
    sets.push_back(std::move(set));
  }
  return sets;
}

std::vector<DeliverySet> load_delivery_sets(const Scenario& scenario, const std::filesystem::path& path) {
  return parse_delivery_sets(scenario, detail::read_text_file(path));
}

}  // namespace hyfleet
