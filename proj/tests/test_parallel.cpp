#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <vector>

#include "doctest.h"
#include "vscreen/algorithms.hpp"
#include "vscreen/evaluators.hpp"
#include "vscreen/parallel.hpp"

using namespace vscreen;

namespace {

std::unique_ptr<SyntheticEvaluator> small_problem() {
  return build_synthetic(synthetic_row("rm-normal", 32, 4, 0.2, 5));
}

BudgetPlan small_plan() { return split_budget(1600, 32, 0.2, 0.2); }

EfgParams small_params() {
  EfgParams p;
  p.m = 4;
  p.M = 8;
  return p;
}

}  // namespace

TEST_CASE("one simulated worker reproduces the synchronous run exactly") {
  const auto eval = small_problem();
  const BudgetPlan plan = small_plan();
  const EfgParams params = small_params();
  const auto sync = run_efg_M_plus(*eval, plan, params, 42);

  AsyncOptions options;
  options.workers = 1;
  const AsyncReport report =
      run_efg_M_plus_async(*eval, plan, params, 42, options);
  CHECK(report.selection.selected == sync.selected);
  CHECK(report.selection.terminal_means == sync.terminal_means);
  CHECK(report.selection.terminal_counts == sync.terminal_counts);
  CHECK(report.selection.consumed_budget == plan.total);
  CHECK(report.utilization == doctest::Approx(1.0));
}

TEST_CASE("many workers spend the exact budget and report utilization") {
  const auto eval = small_problem();
  const BudgetPlan plan = small_plan();
  for (std::uint32_t q : {3u, 10u}) {
    AsyncOptions options;
    options.workers = q;
    const AsyncReport report =
        run_efg_M_plus_async(*eval, plan, small_params(), 9, options);
    CHECK(report.selection.consumed_budget == plan.total);
    CHECK(report.selection.selected.size() == 4);
    CHECK(report.workers == q);
    CHECK(report.utilization > 0.0);
    CHECK(report.utilization <= 1.0 + 1e-9);
    CHECK(report.speedup <= q + 1e-9);
    CHECK(report.makespan_ms > 0.0);
  }
}

TEST_CASE("coordinator rejects unknown and repeated reports") {
  const auto eval = small_problem();
  AsyncCoordinator coord(*eval, small_plan(), small_params(), 3);
  auto tasks = coord.next_tasks(4);
  REQUIRE(tasks.size() == 4);
  CHECK(coord.in_flight() == 4);

  AsyncCoordinator::Task bogus = tasks[0];
  bogus.task_id = 999999;
  CHECK_THROWS_AS(coord.report(bogus, 1.0), std::logic_error);

  coord.report(tasks[0], 1.0);
  CHECK_THROWS_AS(coord.report(tasks[0], 1.0), std::logic_error);
  CHECK(coord.in_flight() == 3);
  CHECK_THROWS_AS(coord.finish(), std::logic_error);  // not done yet
}

TEST_CASE("reports may arrive in any order") {
  const auto eval = small_problem();
  const BudgetPlan plan = small_plan();
  AsyncCoordinator forward(*eval, plan, small_params(), 8);
  AsyncCoordinator reversed(*eval, plan, small_params(), 8);

  auto drive = [&](AsyncCoordinator& coord, bool reverse) {
    while (!coord.done()) {
      auto tasks = coord.next_tasks(16);
      REQUIRE(!tasks.empty());
      if (reverse) std::reverse(tasks.begin(), tasks.end());
      for (const auto& t : tasks)
        coord.report(t, eval->sample(t.alt, t.draw_index, coord.run_seed()));
    }
  };
  drive(forward, false);
  drive(reversed, true);
  CHECK(forward.issued() == plan.total);
  CHECK(reversed.issued() == plan.total);
  // values are keyed by draw index, so the terminal state is order-invariant
  // up to floating-point accumulation order
  CHECK(forward.finish().selected == reversed.finish().selected);
  const auto& fm = forward.state().means();
  const auto& rm = reversed.state().means();
  REQUIRE(fm.size() == rm.size());
  for (std::size_t i = 0; i < fm.size(); ++i)
    CHECK(fm[i] == doctest::Approx(rm[i]).epsilon(1e-12));
}

TEST_CASE("phase barriers hold back tasks until reports land") {
  const auto eval = small_problem();
  const BudgetPlan plan = small_plan();
  AsyncCoordinator coord(*eval, plan, small_params(), 4);
  CHECK(coord.phase() == AsyncCoordinator::Phase::seeding);

  // drain seeding except one straggler: the exploration phase must wait
  std::vector<AsyncCoordinator::Task> pending;
  const std::uint64_t seeding_total =
      std::uint64_t{plan.seeding_per_alt} * eval->k();
  while (coord.issued() < seeding_total) {
    for (const auto& t : coord.next_tasks(8)) pending.push_back(t);
  }
  const auto straggler = pending.back();
  pending.pop_back();
  for (const auto& t : pending)
    coord.report(t, eval->sample(t.alt, t.draw_index, coord.run_seed()));
  CHECK(coord.next_tasks(8).empty());
  CHECK(coord.phase() == AsyncCoordinator::Phase::seeding);
  coord.report(straggler,
               eval->sample(straggler.alt, straggler.draw_index, coord.run_seed()));
  CHECK(coord.phase() == AsyncCoordinator::Phase::exploration);
  CHECK(!coord.next_tasks(8).empty());
}

TEST_CASE("real worker threads complete a small run") {
  const auto eval = build_synthetic(synthetic_row("rm-normal", 16, 2, 0.2, 6));
  const BudgetPlan plan = split_budget(320, 16, 0.2, 0.2);
  EfgParams params;
  params.m = 2;
  params.M = 4;
  AsyncOptions options;
  options.workers = 4;
  options.latency_max_ms = 0.01;
  options.real_threads = true;
  const AsyncReport report =
      run_efg_M_plus_async(*eval, plan, params, 31, options);
  CHECK(report.selection.consumed_budget == plan.total);
  CHECK(report.selection.selected.size() == 2);
  CHECK(report.makespan_ms > 0.0);
}
