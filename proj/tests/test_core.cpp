#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "vscreen/core.hpp"
#include "vscreen/rng.hpp"

using namespace vscreen;

TEST_CASE("running mean updates") {
  SampleState state(3);
  CHECK(state.count(1) == 0);
  update_mean(state, 1, 5.0);
  CHECK(state.count(1) == 1);
  CHECK(state.mean(1) == doctest::Approx(5.0));

  for (int v = 1; v <= 10; ++v) update_mean(state, 0, v);
  CHECK(state.count(0) == 10);
  CHECK(state.mean(0) == doctest::Approx(5.5));
  CHECK(state.total() == 11);
}

TEST_CASE("running mean drift stays bounded over a million updates") {
  SampleState state(1);
  Rng rng(7);
  double sum = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const double v = 1.0 + 1e-6 * rng.next_uniform();
    sum += v;
    update_mean(state, 0, v);
  }
  CHECK(std::abs(state.mean(0) - sum / n) <= 1e-9);
}

TEST_CASE("top_m matches a full sort") {
  Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const std::uint32_t k = 5 + static_cast<std::uint32_t>(rng.next_u64() % 60);
    const std::uint32_t m = 1 + static_cast<std::uint32_t>(rng.next_u64() % k);
    std::vector<double> means(k);
    for (auto& v : means)
      v = std::floor(rng.next_uniform() * 8.0);  // coarse grid forces ties
    const auto got = top_m_indices(means, m);
    REQUIRE(got.size() == m);

    std::vector<std::uint32_t> order(k);
    for (std::uint32_t i = 0; i < k; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) {
                       return means[a] > means[b];
                     });
    for (std::uint32_t j = 0; j < m; ++j) CHECK(got[j] == order[j]);
  }
}

TEST_CASE("top_m_select requires observations and agrees with mean vector") {
  SampleState state(4);
  update_mean(state, 0, 1.0);
  update_mean(state, 1, 3.0);
  update_mean(state, 2, 3.0);
  CHECK_THROWS_AS(top_m_select(state, 2), std::invalid_argument);
  update_mean(state, 3, 2.0);
  const auto sel = top_m_select(state, 2);
  CHECK(sel == std::vector<std::uint32_t>{1, 2});  // tie broken by lower index
}

TEST_CASE("good set boundary is inclusive") {
  const std::vector<double> means{3.0, 2.0, 1.9, 1.5};
  const GoodSet good = good_set(means, 2, 0.1);
  CHECK(good.threshold == doctest::Approx(1.9));
  CHECK(good.members == std::vector<std::uint32_t>{0, 1, 2});
  CHECK(good.contains(2));
  CHECK_FALSE(good.contains(3));
}

TEST_CASE("ibr relation trichotomy") {
  CHECK(ibr_relation(1.0, 0.0, 0.5) == IbrRelation::a_dominates);
  CHECK(ibr_relation(0.0, 1.0, 0.5) == IbrRelation::b_dominates);
  CHECK(ibr_relation(0.4, 0.0, 0.5) == IbrRelation::indifferent);
  // boundary gap == delta counts as dominance
  CHECK(ibr_relation(0.5, 0.0, 0.5) == IbrRelation::a_dominates);
}

TEST_CASE("screening and ranking predicates") {
  const std::vector<double> truth{3.0, 2.0, 1.9, 1.0};
  const GoodSet good = good_set(truth, 2, 0.15);

  SelectionResult r;
  r.selected = {0, 2};
  r.terminal_means = {3.1, 1.8};
  CHECK(is_good_screening(r, good));
  CHECK(is_good_ranking(r, truth, 0.15));  // gap 1.1 > delta, order consistent

  SelectionResult swapped;
  swapped.selected = {2, 0};
  swapped.terminal_means = {2.5, 2.4};
  CHECK(is_good_screening(swapped, good));
  CHECK_FALSE(is_good_ranking(swapped, truth, 0.15));

  SelectionResult bad;
  bad.selected = {0, 3};
  bad.terminal_means = {3.0, 2.9};
  CHECK_FALSE(is_good_screening(bad, good));

  // within-delta pairs never constrain the ranking
  SelectionResult close_pair;
  close_pair.selected = {2, 1};
  close_pair.terminal_means = {2.2, 2.1};
  CHECK(is_good_ranking(close_pair, truth, 0.15));
}

TEST_CASE("budget split conserves the total") {
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint32_t k = 2 + static_cast<std::uint32_t>(rng.next_u64() % 500);
    const std::uint64_t total =
        10ull * k + rng.next_u64() % (1000ull * k);
    const double sf = 0.3 * rng.next_uniform();
    const double gf = 0.05 + 0.3 * rng.next_uniform();
    const BudgetPlan plan = split_budget(total, k, sf, gf);
    CHECK(plan.total == total);
    CHECK(static_cast<std::uint64_t>(plan.seeding_per_alt + plan.explore_per_alt)
              * k + plan.greedy_total == total);
    CHECK(plan.explore_per_alt >= 1);
    plan.validate(k);
  }
  CHECK_THROWS_AS(split_budget(10, 100, 0.0, 0.2), std::invalid_argument);
}

TEST_CASE("budget from money floors") {
  CHECK(budget_from_money(10.0, 3.0) == 3);
  CHECK(budget_from_money(62.4, 0.0000482) == 1294605);
}

TEST_CASE("problem instance validation") {
  ProblemInstance p;
  p.k = 10;
  p.m = 3;
  p.delta = 0.1;
  CHECK_NOTHROW(p.validate());
  p.m = 10;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.m = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
