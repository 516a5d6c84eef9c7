// Asynchronous variant of the seeded top-M greedy algorithm.  A coordinator
// owns the running statistics and hands out single-observation tasks;
// workers evaluate and report in any order.  Greedy decisions are made in
// width-M batches against possibly stale means: alternatives with a task in
// flight are simply absent from the pool until their report lands.
//
// Two execution modes share the coordinator: a deterministic virtual-time
// event simulation (latency drawn per task, clock never sleeps) used for
// throughput measurements, and a real-thread mode for integration smoke
// tests.  With one worker the virtual-time trajectory reproduces the
// synchronous algorithm observation for observation.
#pragma once

#include <cstdint>
#include <deque>
#include <unordered_map>
#include <vector>

#include "vscreen/algorithms.hpp"
#include "vscreen/core.hpp"
#include "vscreen/evaluators.hpp"

namespace vscreen {

class AsyncCoordinator {
 public:
  enum class Phase { seeding, exploration, greedy, done };

  struct Task {
    std::uint64_t task_id = 0;
    std::uint32_t alt = 0;
    std::uint64_t draw_index = 0;  // for Evaluator::sample
  };

  AsyncCoordinator(const Evaluator& evaluator, const BudgetPlan& plan,
                   const EfgParams& params, std::uint64_t run_seed);

  // Up to max_batch tasks; empty when the current phase is waiting on
  // outstanding reports (a barrier) or the run is finished.
  std::vector<Task> next_tasks(std::uint32_t max_batch);

  // Throws std::logic_error for an unknown or already-reported task id.
  void report(const Task& task, double value);

  Phase phase() const { return phase_; }
  bool done() const { return phase_ == Phase::done; }
  std::uint64_t issued() const { return issued_; }
  std::uint64_t in_flight() const {
    return static_cast<std::uint64_t>(outstanding_.size());
  }
  std::uint64_t run_seed() const { return run_seed_; }
  const SampleState& state() const { return state_; }

  // Final selection; throws std::logic_error before done().
  SelectionResult finish() const;

 private:
  void refill_greedy_ready();
  void advance_phase();

  const Evaluator& evaluator_;
  BudgetPlan plan_;
  EfgParams params_;
  std::uint64_t run_seed_;

  Phase phase_ = Phase::seeding;
  SampleState state_;
  std::vector<std::uint64_t> draw_counts_;
  std::vector<double> seed_sums_;
  std::vector<std::uint32_t> ranking_;  // seeded descending ranking
  SeedingPlan groups_;
  std::vector<std::uint32_t> explore_alts_;  // alt per exploration task

  // cursors over the deterministic seeding / exploration task sequences
  std::uint64_t phase_issued_ = 0;
  std::uint64_t phase_target_ = 0;
  std::uint64_t phase_reported_ = 0;

  // greedy bookkeeping
  std::vector<std::uint32_t> heap_;  // alt indices, max-heap by current mean
  std::deque<Task> ready_;           // current width-M decision batch
  std::uint64_t greedy_remaining_ = 0;

  std::uint64_t issued_ = 0;
  std::uint64_t next_task_id_ = 1;
  std::unordered_map<std::uint64_t, std::uint32_t> outstanding_;  // id -> alt
};

struct AsyncOptions {
  std::uint32_t workers = 1;
  double latency_max_ms = 1.0;  // per-task latency ~ Uniform(0, max)
  bool real_threads = false;    // sleep for real instead of simulating
  std::uint64_t latency_seed = 0;
};

struct AsyncReport {
  SelectionResult selection;
  std::uint32_t workers = 1;
  double makespan_ms = 0.0;  // virtual (or wall) clock of the whole run
  double busy_ms = 0.0;      // total task latency across workers
  double speedup = 0.0;      // busy / makespan
  double utilization = 0.0;  // speedup / workers
};

AsyncReport run_efg_M_plus_async(const Evaluator& evaluator,
                                 const BudgetPlan& plan,
                                 const EfgParams& params, std::uint64_t seed,
                                 const AsyncOptions& options);

}  // namespace vscreen
