#include "vscreen/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <mutex>
#include <queue>
#include <stdexcept>
#include <thread>

#include "vscreen/rng.hpp"

namespace vscreen {

namespace {

// Max-heap order over alternative indices by current mean, lower index on
// ties.  Means of in-heap alternatives never change (an alternative is
// popped before any new observation of it is issued), so the heap property
// survives state updates.
struct HeapLess {
  const SampleState* state;
  bool operator()(std::uint32_t a, std::uint32_t b) const {
    const double ma = state->mean(a);
    const double mb = state->mean(b);
    if (ma != mb) return ma < mb;
    return a > b;
  }
};

}  // namespace

AsyncCoordinator::AsyncCoordinator(const Evaluator& evaluator,
                                   const BudgetPlan& plan,
                                   const EfgParams& params,
                                   std::uint64_t run_seed)
    : evaluator_(evaluator),
      plan_(plan),
      params_(params),
      run_seed_(run_seed),
      state_(evaluator.k()),
      draw_counts_(evaluator.k(), 0),
      seed_sums_(evaluator.k(), 0.0) {
  plan_.validate(evaluator.k());
  if (plan_.seeding_per_alt < 1)
    throw std::invalid_argument("async run requires a seeding tranche >= 1");
  phase_target_ =
      static_cast<std::uint64_t>(evaluator.k()) * plan_.seeding_per_alt;
}

std::vector<AsyncCoordinator::Task> AsyncCoordinator::next_tasks(
    std::uint32_t max_batch) {
  std::vector<Task> out;
  if (phase_ == Phase::done) return out;

  auto issue = [&](std::uint32_t alt) {
    Task t;
    t.task_id = next_task_id_++;
    t.alt = alt;
    t.draw_index = draw_counts_[alt]++;
    outstanding_.emplace(t.task_id, alt);
    ++issued_;
    out.push_back(t);
  };

  if (phase_ == Phase::seeding) {
    while (out.size() < max_batch && phase_issued_ < phase_target_) {
      issue(static_cast<std::uint32_t>(phase_issued_ / plan_.seeding_per_alt));
      ++phase_issued_;
    }
    return out;
  }

  if (phase_ == Phase::exploration) {
    while (out.size() < max_batch && phase_issued_ < phase_target_) {
      issue(explore_alts_[phase_issued_]);
      ++phase_issued_;
    }
    return out;
  }

  // greedy
  while (out.size() < max_batch) {
    if (ready_.empty()) refill_greedy_ready();
    if (ready_.empty()) break;
    Task t = ready_.front();
    ready_.pop_front();
    outstanding_.emplace(t.task_id, t.alt);
    ++issued_;
    out.push_back(t);
  }
  return out;
}

void AsyncCoordinator::refill_greedy_ready() {
  if (greedy_remaining_ == 0) return;
  const std::uint32_t width = static_cast<std::uint32_t>(std::min<std::uint64_t>(
      {params_.greedy_width(), greedy_remaining_, heap_.size()}));
  HeapLess less{&state_};
  for (std::uint32_t j = 0; j < width; ++j) {
    std::pop_heap(heap_.begin(), heap_.end(), less);
    const std::uint32_t alt = heap_.back();
    heap_.pop_back();
    Task t;
    t.task_id = next_task_id_++;
    t.alt = alt;
    t.draw_index = draw_counts_[alt]++;
    ready_.push_back(t);
  }
  greedy_remaining_ -= width;
}

void AsyncCoordinator::report(const Task& task, double value) {
  auto it = outstanding_.find(task.task_id);
  if (it == outstanding_.end())
    throw std::logic_error("report for an unknown or already-reported task");
  if (it->second != task.alt)
    throw std::logic_error("report alternative does not match the issued task");
  outstanding_.erase(it);

  if (phase_ == Phase::seeding) {
    seed_sums_[task.alt] += value;
    ++phase_reported_;
    if (phase_reported_ == phase_target_) advance_phase();
    return;
  }
  if (phase_ == Phase::exploration) {
    state_.update(task.alt, value);
    ++phase_reported_;
    if (phase_reported_ == phase_target_) advance_phase();
    return;
  }
  // greedy: reported alternative rejoins the pool with its fresh mean
  state_.update(task.alt, value);
  heap_.push_back(task.alt);
  std::push_heap(heap_.begin(), heap_.end(), HeapLess{&state_});
  if (greedy_remaining_ == 0 && ready_.empty() && outstanding_.empty())
    phase_ = Phase::done;
}

void AsyncCoordinator::advance_phase() {
  const std::uint32_t k = evaluator_.k();
  if (phase_ == Phase::seeding) {
    // seed observations are dropped from the statistics; only the ranking
    // survives
    std::vector<double> seed_means(k);
    for (std::uint32_t i = 0; i < k; ++i)
      seed_means[i] = seed_sums_[i] / plan_.seeding_per_alt;
    ranking_ = top_m_indices(seed_means, k);
    groups_ = make_seeding_plan(k, params_.m, plan_.explore_per_alt,
                                params_.group_count);
    explore_alts_.clear();
    for (std::uint32_t r = 0; r < groups_.group_count; ++r) {
      const auto [begin, end] = groups_.group_ranges[r];
      for (std::uint32_t rank = begin; rank < end; ++rank)
        for (std::uint32_t n = 0; n < groups_.per_group_sample[r]; ++n)
          explore_alts_.push_back(ranking_[rank]);
    }
    phase_ = Phase::exploration;
    phase_issued_ = 0;
    phase_reported_ = 0;
    phase_target_ = explore_alts_.size();
    return;
  }
  // exploration -> greedy
  if (issued_ > plan_.total)
    throw std::logic_error("seeding + exploration exceed the total budget");
  greedy_remaining_ = plan_.total - issued_;
  heap_.resize(k);
  for (std::uint32_t i = 0; i < k; ++i) heap_[i] = i;
  std::make_heap(heap_.begin(), heap_.end(), HeapLess{&state_});
  phase_ = Phase::greedy;
  if (greedy_remaining_ == 0) phase_ = Phase::done;
}

SelectionResult AsyncCoordinator::finish() const {
  if (phase_ != Phase::done)
    throw std::logic_error("finish() before the run completed");
  SelectionResult result;
  result.selected = top_m_select(state_, params_.m);
  for (std::uint32_t alt : result.selected) {
    result.terminal_means.push_back(state_.mean(alt));
    result.terminal_counts.push_back(state_.count(alt));
  }
  result.consumed_budget = issued_;
  return result;
}

namespace {

struct SimEvent {
  double time;
  std::uint64_t task_id;
  std::uint32_t worker;
  AsyncCoordinator::Task task;
  double value;
};
struct SimEventLater {
  bool operator()(const SimEvent& a, const SimEvent& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.task_id > b.task_id;
  }
};

AsyncReport run_simulated(const Evaluator& evaluator, AsyncCoordinator& coord,
                          const AsyncOptions& options) {
  Rng latency_rng(
      derive_seed(hash_combine(coord.run_seed(), 0xA51Cu), options.latency_seed));
  std::priority_queue<SimEvent, std::vector<SimEvent>, SimEventLater> events;
  std::vector<std::uint32_t> idle;
  double busy = 0.0;
  double makespan = 0.0;

  // true when a task was scheduled, false when the worker parked idle
  auto try_issue = [&](std::uint32_t worker, double now) {
    std::vector<AsyncCoordinator::Task> tasks = coord.next_tasks(1);
    if (tasks.empty()) {
      idle.push_back(worker);
      return;
    }
    const AsyncCoordinator::Task& t = tasks.front();
    SimEvent ev;
    ev.task_id = t.task_id;
    ev.worker = worker;
    ev.task = t;
    ev.value = evaluator.sample(t.alt, t.draw_index, coord.run_seed());
    const double latency = latency_rng.next_uniform() * options.latency_max_ms;
    busy += latency;
    ev.time = now + latency;
    events.push(ev);
  };

  for (std::uint32_t w = 0; w < options.workers; ++w) try_issue(w, 0.0);
  while (!events.empty()) {
    SimEvent ev = events.top();
    events.pop();
    makespan = std::max(makespan, ev.time);
    coord.report(ev.task, ev.value);
    // the reporting worker plus any parked workers retry at this instant;
    // a report can open a phase barrier for all of them
    std::vector<std::uint32_t> attempts;
    attempts.swap(idle);
    attempts.push_back(ev.worker);
    for (std::uint32_t w : attempts) try_issue(w, ev.time);
  }
  if (!coord.done())
    throw std::logic_error("event loop drained before the run completed");

  AsyncReport report;
  report.selection = coord.finish();
  report.workers = options.workers;
  report.makespan_ms = makespan;
  report.busy_ms = busy;
  if (makespan > 0.0) {
    report.speedup = busy / makespan;
    report.utilization = report.speedup / options.workers;
  } else {
    report.speedup = options.workers;
    report.utilization = 1.0;
  }
  return report;
}

AsyncReport run_threaded(const Evaluator& evaluator, AsyncCoordinator& coord,
                         const AsyncOptions& options) {
  Rng latency_rng(
      derive_seed(hash_combine(coord.run_seed(), 0xA51Cu), options.latency_seed));
  std::mutex mu;
  double busy = 0.0;
  const auto start = std::chrono::steady_clock::now();

  auto worker_loop = [&]() {
    for (;;) {
      AsyncCoordinator::Task task;
      double latency;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (coord.done()) return;
        std::vector<AsyncCoordinator::Task> tasks = coord.next_tasks(1);
        if (tasks.empty()) {
          // phase barrier: another worker holds the last outstanding task
          latency = -1.0;
        } else {
          task = tasks.front();
          latency = latency_rng.next_uniform() * options.latency_max_ms;
          busy += latency;
        }
      }
      if (latency < 0.0) {
        std::this_thread::sleep_for(std::chrono::microseconds(50));
        continue;
      }
      const double value = evaluator.sample(task.alt, task.draw_index,
                                            coord.run_seed());
      std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(latency));
      std::lock_guard<std::mutex> lock(mu);
      coord.report(task, value);
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(options.workers);
  for (std::uint32_t w = 0; w < options.workers; ++w)
    threads.emplace_back(worker_loop);
  for (auto& t : threads) t.join();

  AsyncReport report;
  report.selection = coord.finish();
  report.workers = options.workers;
  report.makespan_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                start)
          .count();
  report.busy_ms = busy;
  if (report.makespan_ms > 0.0) {
    report.speedup = report.busy_ms / report.makespan_ms;
    report.utilization = report.speedup / options.workers;
  }
  return report;
}

}  // namespace

AsyncReport run_efg_M_plus_async(const Evaluator& evaluator,
                                 const BudgetPlan& plan,
                                 const EfgParams& params, std::uint64_t seed,
                                 const AsyncOptions& options) {
  if (options.workers < 1)
    throw std::invalid_argument("need at least one worker");
  AsyncCoordinator coord(evaluator, plan, params, seed);
  if (options.real_threads) return run_threaded(evaluator, coord, options);
  return run_simulated(evaluator, coord, options);
}

}  // namespace vscreen
