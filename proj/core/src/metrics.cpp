#include "hyfleet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hyfleet/errors.hpp"

namespace hyfleet {

CategoryStats category_stats(std::vector<Seconds> samples) {
  CategoryStats s;
  std::sort(samples.begin(), samples.end());
  s.n = samples.size();
  if (s.n > 0) {
    s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(s.n);
    s.median = s.n % 2 == 1 ? samples[s.n / 2] : 0.5 * (samples[s.n / 2 - 1] + samples[s.n / 2]);
  }
  s.samples = std::move(samples);
  return s;
}

WaitingStats waiting_stats(const std::map<JobId, Seconds>& completion, const DeliverySet& set) {
  std::vector<Seconds> medical;
  std::vector<Seconds> standard;
  std::vector<Seconds> all;
  for (const DeliveryJob& j : set.jobs) {
    auto it = completion.find(j.id);
    if (it == completion.end()) {
      throw ConsistencyError("job " + std::to_string(j.id) + " of set " + std::to_string(set.id) +
                             " has no completion time");
    }
    (j.category == Category::Medical ? medical : standard).push_back(it->second);
    all.push_back(it->second);
  }
  WaitingStats w;
  if (!medical.empty()) w.medical = category_stats(std::move(medical));
  if (!standard.empty()) w.standard = category_stats(std::move(standard));
  w.all = category_stats(std::move(all));
  return w;
}

WaitingStats waiting_stats(const DeliveryTrace& trace, const DeliverySet& set) {
  return waiting_stats(trace.completion, set);
}

double capacity_at(const CategoryStats& stats, Seconds threshold) {
  if (stats.n == 0) throw ParameterError("capacity_at on an empty sample");
  const auto within = std::upper_bound(stats.samples.begin(), stats.samples.end(), threshold) - stats.samples.begin();
  return static_cast<double>(within) / static_cast<double>(stats.n);
}

double capacity_at(const WaitingStats& stats, Seconds threshold) { return capacity_at(stats.all, threshold); }

PrioritizationEffect prioritization_effect(const WaitingStats& base, const WaitingStats& prio) {
  auto change = [](const std::optional<CategoryStats>& b, const std::optional<CategoryStats>& p) {
    if (!b || !p) return 0.0;
    if (b->mean == 0.0) throw DegenerateInputError("baseline mean waiting time is zero");
    return (p->mean - b->mean) / b->mean;
  };
  return {change(base.medical, prio.medical), change(base.standard, prio.standard)};
}

std::string_view to_string(StatCategory c) {
  switch (c) {
    case StatCategory::Medical: return "medical";
    case StatCategory::Standard: return "standard";
    case StatCategory::All: return "all";
  }
  return "?";
}

const SummaryRow* SweepSummary::find(std::uint32_t drones, bool prioritized, StatCategory category) const {
  for (const SummaryRow& r : rows) {
    if (r.drones == drones && r.prioritized == prioritized && r.category == category) return &r;
  }
  return nullptr;
}

SweepSummary summarize_sweep(const SweepResult& results) {
  if (results.rows.empty()) throw ParameterError("summarize_sweep on an empty sweep");
  std::map<std::pair<std::uint32_t, bool>, std::vector<const SweepRow*>> groups;
  for (const SweepRow& r : results.rows) groups[{r.drones, r.prioritized}].push_back(&r);

  SweepSummary out;
  for (const auto& [key, rows] : groups) {
    const auto [drones, prioritized] = key;
    for (StatCategory cat : {StatCategory::Medical, StatCategory::Standard, StatCategory::All}) {
      SummaryRow s;
      s.drones = drones;
      s.prioritized = prioritized;
      s.category = cat;
      for (const SweepRow* r : rows) {
        const CategoryStats* c = cat == StatCategory::All        ? &r->stats.all
                                 : cat == StatCategory::Medical ? (r->stats.medical ? &*r->stats.medical : nullptr)
                                                                : (r->stats.standard ? &*r->stats.standard : nullptr);
        if (c == nullptr) continue;
        ++s.sets;
        s.mean += c->mean;
        s.median += c->median;
        s.capacity_20min += capacity_at(*c, kCapacityThreshold);
        s.makespan += r->makespan;
      }
      if (s.sets == 0) continue;
      const auto n = static_cast<double>(s.sets);
      s.mean /= n;
      s.median /= n;
      s.capacity_20min /= n;
      s.makespan /= n;
      out.rows.push_back(s);
    }

    Seconds longest = 0.0;
    for (const SweepRow* r : rows) longest = std::max(longest, r->stats.all.samples.back());
    const auto minutes = static_cast<std::uint32_t>(std::ceil(longest / 60.0));
    for (std::uint32_t m = 0; m <= minutes; ++m) {
      double cap = 0.0;
      for (const SweepRow* r : rows) cap += capacity_at(r->stats, m * 60.0);
      out.capacity_curve.push_back({drones, prioritized, m, cap / static_cast<double>(rows.size())});
    }
  }
  return out;
}

std::string summary_csv(const SweepSummary& summary) {
  std::ostringstream out;
  out << "drones,prioritized,category,mean_s,median_s,capacity_20min\n";
  for (const SummaryRow& r : summary.rows) {
    out << r.drones << ',' << (r.prioritized ? 1 : 0) << ',' << to_string(r.category) << ','
        << format_number(r.mean) << ',' << format_number(r.median) << ',' << format_number(r.capacity_20min)
        << '\n';
  }
  return out.str();
}

std::string capacity_csv(const SweepSummary& summary) {
  std::ostringstream out;
  out << "drones,prioritized,minute,capacity\n";
  for (const CapacityPoint& p : summary.capacity_curve) {
    out << p.drones << ',' << (p.prioritized ? 1 : 0) << ',' << p.minute << ',' << format_number(p.capacity) << '\n';
  }
  return out.str();
}

}  // namespace hyfleet
