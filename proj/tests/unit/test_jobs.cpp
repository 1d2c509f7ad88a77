#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "fixtures.hpp"
#include "hyfleet/errors.hpp"
#include "hyfleet/jobs.hpp"

using namespace hyfleet;

namespace {

const Scenario& default_scenario() {
  static const Scenario s = generate_grid_scenario({});
  return s;
}

// Evaluates both empirical CDFs at every sample point.
double ks_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  auto cdf = [](const std::vector<double>& xs, double t) {
    return static_cast<double>(std::count_if(xs.begin(), xs.end(), [&](double x) { return x <= t; })) /
           static_cast<double>(xs.size());
  };
  double d = 0;
  for (const auto* xs : {&a, &b}) {
    for (double t : *xs) d = std::max(d, std::abs(cdf(a, t) - cdf(b, t)));
  }
  return d;
}

}  // namespace

TEST(DeliverySets, DefaultCounts) {
  const auto sets = generate_delivery_sets(default_scenario(), {});
  ASSERT_EQ(sets.size(), 50u);
  for (const DeliverySet& s : sets) {
    ASSERT_EQ(s.jobs.size(), 15u);
    EXPECT_EQ(std::count_if(s.jobs.begin(), s.jobs.end(), [](const auto& j) { return j.category == Category::Medical; }),
              5);
    std::set<BuildingId> buildings;
    for (const DeliveryJob& j : s.jobs) {
      buildings.insert(j.building);
      EXPECT_EQ(j.target, default_scenario().building(j.building).access_point);
    }
    EXPECT_EQ(buildings.size(), 15u);
    EXPECT_FALSE(s.with_replacement);
  }
}

TEST(DeliverySets, SingleStandardJob) {
  const auto sets = generate_delivery_sets(default_scenario(), {1, 1, 0, 3});
  ASSERT_EQ(sets.size(), 1u);
  ASSERT_EQ(sets[0].jobs.size(), 1u);
  EXPECT_EQ(sets[0].jobs[0].category, Category::Standard);
}

TEST(DeliverySets, Deterministic) {
  EXPECT_EQ(generate_delivery_sets(default_scenario(), {}), generate_delivery_sets(default_scenario(), {}));
  JobParams other;
  other.seed = 43;
  EXPECT_NE(generate_delivery_sets(default_scenario(), {}), generate_delivery_sets(default_scenario(), other));
}

TEST(DeliverySets, WithReplacementWhenTooFewBuildings) {
  const Scenario s = generate_grid_scenario({2, 2, 100, 2, 1});
  const auto sets = generate_delivery_sets(s, {3, 5, 2, 9});
  for (const DeliverySet& set : sets) {
    EXPECT_TRUE(set.with_replacement);
    EXPECT_EQ(set.jobs.size(), 5u);
  }
}

TEST(DeliverySets, Errors) {
  EXPECT_THROW(generate_delivery_sets(generate_grid_scenario({2, 2, 100, 0, 1}), {}), ScenarioError);
  EXPECT_THROW(generate_delivery_sets(default_scenario(), {1, 3, 4, 1}), ParameterError);
}

TEST(DeliverySets, CountsHoldForRandomParams) {
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    JobParams p;
    p.n_sets = static_cast<std::uint32_t>(rng.between(1, 5));
    p.per_set = static_cast<std::uint32_t>(rng.between(1, 40));
    p.medical_per_set = static_cast<std::uint32_t>(rng.between(0, p.per_set));
    p.seed = rng.next_u64();
    const auto sets = generate_delivery_sets(default_scenario(), p);
    ASSERT_EQ(sets.size(), p.n_sets);
    for (std::size_t k = 0; k < sets.size(); ++k) {
      EXPECT_EQ(sets[k].id, k);
      ASSERT_EQ(sets[k].jobs.size(), p.per_set);
      std::set<JobId> ids;
      std::size_t medical = 0;
      for (const auto& j : sets[k].jobs) {
        ids.insert(j.id);
        medical += j.category == Category::Medical;
      }
      EXPECT_EQ(ids.size(), p.per_set);
      EXPECT_EQ(medical, p.medical_per_set);
    }
  }
}

TEST(DeliverySets, JsonRoundTrip) {
  const auto sets = generate_delivery_sets(default_scenario(), {4, 6, 2, 5});
  EXPECT_EQ(parse_delivery_sets(default_scenario(), dump_delivery_sets(sets)), sets);
}

TEST(DeliverySets, UnknownBuildingRejected) {
  const std::string text = R"([{"id": 0, "jobs": [{"id": 0, "building": 99999, "category": "medical"}]}])";
  EXPECT_THROW(parse_delivery_sets(default_scenario(), text), Error);
}

TEST(Ipd, Examples) {
  const std::vector<Point> line{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  EXPECT_EQ(ipd_distribution(line), (std::vector<double>{1, 1, 2}));
  const std::vector<Point> same{{3, 4, 0}, {3, 4, 0}};
  EXPECT_EQ(ipd_distribution(same), (std::vector<double>{0}));
  const std::vector<Point> square{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  const auto d = ipd_distribution(square);
  ASSERT_EQ(d.size(), 6u);
  for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(d[i], 1.0);
  EXPECT_DOUBLE_EQ(d[4], std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(d[5], std::sqrt(2.0));
  const std::vector<Point> one{{0, 0, 0}};
  EXPECT_THROW(ipd_distribution(one), ParameterError);
}

TEST(Ks, Examples) {
  const std::vector<double> a{1, 2, 3};
  EXPECT_DOUBLE_EQ(ks_statistic(a, a), 0.0);
  EXPECT_DOUBLE_EQ(ks_statistic(std::vector<double>{0}, std::vector<double>{1}), 1.0);
  // F_a steps to 1/2 at 0 and 1 at 1; F_b steps to 1/2 at 0 and 1 at 2.
  // On [1, 2) they differ by 1 - 1/2.
  EXPECT_DOUBLE_EQ(ks_statistic(std::vector<double>{0, 1}, std::vector<double>{0, 2}), 0.5);
  EXPECT_THROW(ks_statistic(std::vector<double>{}, a), ParameterError);
}

TEST(Ks, MatchesBruteForceWithTies) {
  Rng rng(8);
  for (int i = 0; i < 300; ++i) {
    std::vector<double> a(static_cast<std::size_t>(rng.between(1, 30)));
    std::vector<double> b(static_cast<std::size_t>(rng.between(1, 30)));
    for (double& x : a) x = static_cast<double>(rng.between(0, 10));
    for (double& x : b) x = static_cast<double>(rng.between(0, 12));
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    ASSERT_NEAR(ks_statistic(a, b), ks_oracle(a, b), 1e-12);
    ASSERT_DOUBLE_EQ(ks_statistic(a, b), ks_statistic(b, a));
  }
}
