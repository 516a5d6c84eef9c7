#include "vscreen/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace vscreen {

namespace {

// Draws observations with per-alternative draw counters so that every
// observation is keyed by (run_seed, alt, draw_index) regardless of phase.
struct Sampler {
  const Evaluator& evaluator;
  std::uint64_t run_seed;
  std::vector<std::uint64_t> draw_counts;
  std::uint64_t issued = 0;

  Sampler(const Evaluator& ev, std::uint64_t seed)
      : evaluator(ev), run_seed(seed), draw_counts(ev.k(), 0) {}

  double draw(std::uint32_t alt) {
    ++issued;
    return evaluator.sample(alt, draw_counts[alt]++, run_seed);
  }
};

struct HeapEntry {
  double mean;
  std::uint32_t alt;
};
struct HeapLess {
  bool operator()(const HeapEntry& a, const HeapEntry& b) const {
    if (a.mean != b.mean) return a.mean < b.mean;
    return a.alt > b.alt;  // lower index wins ties
  }
};
using MeanHeap =
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapLess>;

MeanHeap build_heap(const SampleState& state) {
  std::vector<HeapEntry> entries;
  entries.reserve(state.k());
  for (std::uint32_t i = 0; i < state.k(); ++i)
    entries.push_back({state.mean(i), i});
  return MeanHeap(HeapLess{}, std::move(entries));
}

// Greedy phase: repeatedly sample the current top-width alternatives; a
// final partial round samples the top-(remainder) so the budget is spent
// exactly, never overshot.
void greedy_phase(Sampler& sampler, SampleState& state, std::uint32_t width,
                  std::uint64_t budget) {
  MeanHeap heap = build_heap(state);
  std::vector<std::uint32_t> round;
  round.reserve(width);
  std::uint64_t remaining = budget;
  while (remaining > 0) {
    const std::uint32_t w = static_cast<std::uint32_t>(
        std::min<std::uint64_t>(width, remaining));
    round.clear();
    for (std::uint32_t j = 0; j < w; ++j) {
      round.push_back(heap.top().alt);
      heap.pop();
    }
    for (std::uint32_t alt : round) {
      state.update(alt, sampler.draw(alt));
      heap.push({state.mean(alt), alt});
    }
    remaining -= w;
  }
}

SelectionResult finish(const SampleState& state, std::uint32_t m,
                       std::uint64_t consumed) {
  SelectionResult result;
  result.selected = top_m_select(state, m);
  result.terminal_means.reserve(m);
  result.terminal_counts.reserve(m);
  for (std::uint32_t alt : result.selected) {
    result.terminal_means.push_back(state.mean(alt));
    result.terminal_counts.push_back(state.count(alt));
  }
  result.consumed_budget = consumed;
  return result;
}

SelectionResult run_efg_width(const Evaluator& evaluator,
                              const BudgetPlan& plan, std::uint32_t m,
                              std::uint32_t width, std::uint64_t seed,
                              SampleState* out_state) {
  const std::uint32_t k = evaluator.k();
  plan.validate(k);
  if (plan.seeding_per_alt != 0)
    throw std::invalid_argument("EFG-m/M takes no seeding tranche");
  if (plan.explore_per_alt < 1)
    throw std::invalid_argument("exploration budget below 1 per alternative");
  if (m > k || width > k)
    throw std::invalid_argument("m and M must not exceed k");

  Sampler sampler(evaluator, seed);
  SampleState state(k);
  for (std::uint32_t i = 0; i < k; ++i)
    for (std::uint32_t n = 0; n < plan.explore_per_alt; ++n)
      state.update(i, sampler.draw(i));
  greedy_phase(sampler, state, width, plan.greedy_total);
  if (out_state) *out_state = state;
  return finish(state, m, sampler.issued);
}

}  // namespace

SelectionResult run_efg_m(const Evaluator& evaluator, const BudgetPlan& plan,
                          const EfgParams& params, std::uint64_t seed,
                          SampleState* out_state) {
  return run_efg_width(evaluator, plan, params.m, params.m, seed, out_state);
}

SelectionResult run_efg_M(const Evaluator& evaluator, const BudgetPlan& plan,
                          const EfgParams& params, std::uint64_t seed,
                          SampleState* out_state) {
  return run_efg_width(evaluator, plan, params.m, params.greedy_width(), seed,
                       out_state);
}

SeedingPlan make_seeding_plan(std::uint32_t k, std::uint32_t m,
                              std::uint32_t n0,
                              std::optional<std::uint32_t> group_override) {
  SeedingPlan plan;
  std::uint32_t G;
  if (group_override) {
    G = *group_override;
  } else {
    if (k / m < 2)
      throw std::invalid_argument("seeding requires k/m >= 2");
    G = static_cast<std::uint32_t>(
        std::floor(std::log2(static_cast<double>(k) / m)));
  }
  if (G < 1 || (1u << G) - 1 > k)
    throw std::invalid_argument("invalid group count for seeding plan");
  plan.group_count = G;
  const std::uint64_t delta = (1ull << G) - 1;

  // Rank ranges: |I^1| = floor(k/delta); groups double; the last group
  // absorbs all leftover alternatives.
  std::uint32_t prev = 0;
  for (std::uint32_t r = 1; r <= G; ++r) {
    std::uint32_t end;
    if (r == G) {
      end = k;
    } else {
      end = static_cast<std::uint32_t>(
          (static_cast<std::uint64_t>(k) * (1ull << r) - k) / delta);
      // end = floor(k * (2^r - 1) / delta); equals floor(k 2^{r-1}/delta)
      // cumulative boundary of the doubling scheme
      end = static_cast<std::uint32_t>(
          (static_cast<std::uint64_t>(k) * ((1ull << r) - 1)) / delta);
    }
    if (end <= prev)
      throw std::invalid_argument("seeding group with zero alternatives");
    plan.group_ranges.emplace_back(prev, end);
    prev = end;
  }

  // n^r = floor(n0 * (2^G - 1) / (G * 2^{r-1})); allocations below 1 are
  // floored at 1 with the deficit taken from group 1.
  plan.per_group_sample.resize(G);
  std::uint64_t deficit = 0;
  for (std::uint32_t r = 1; r <= G; ++r) {
    std::uint64_t n_r =
        static_cast<std::uint64_t>(n0) * delta / (static_cast<std::uint64_t>(G) << (r - 1));
    if (n_r < 1) {
      const auto [b, e] = plan.group_ranges[r - 1];
      deficit += (e - b);
      n_r = 1;
    }
    plan.per_group_sample[r - 1] =
        static_cast<std::uint32_t>(n_r);
  }
  if (deficit > 0) {
    const auto [b, e] = plan.group_ranges[0];
    const std::uint64_t g1 = e - b;
    const std::uint64_t cut = (deficit + g1 - 1) / g1;
    if (plan.per_group_sample[0] <= cut)
      throw std::invalid_argument("exploration budget too small for groups");
    plan.per_group_sample[0] -= static_cast<std::uint32_t>(cut);
  }
  return plan;
}

SelectionResult run_efg_M_plus(const Evaluator& evaluator,
                               const BudgetPlan& plan, const EfgParams& params,
                               std::uint64_t seed, SampleState* out_state) {
  const std::uint32_t k = evaluator.k();
  plan.validate(k);
  if (plan.seeding_per_alt < 1)
    throw std::invalid_argument("EFG-M+ requires a seeding tranche >= 1");

  Sampler sampler(evaluator, seed);

  // Seeding: rank alternatives by seed means; seed observations are
  // discarded from subsequent statistics.
  std::vector<double> seed_means(k, 0.0);
  for (std::uint32_t i = 0; i < k; ++i) {
    double sum = 0.0;
    for (std::uint32_t n = 0; n < plan.seeding_per_alt; ++n)
      sum += sampler.draw(i);
    seed_means[i] = sum / plan.seeding_per_alt;
  }
  std::vector<std::uint32_t> ranking =
      top_m_indices(seed_means, k);  // full descending ranking

  const SeedingPlan groups = make_seeding_plan(
      k, params.m, plan.explore_per_alt, params.group_count);

  SampleState state(k);
  for (std::uint32_t r = 0; r < groups.group_count; ++r) {
    const auto [begin, end] = groups.group_ranges[r];
    const std::uint32_t n_r = groups.per_group_sample[r];
    for (std::uint32_t rank = begin; rank < end; ++rank) {
      const std::uint32_t alt = ranking[rank];
      for (std::uint32_t n = 0; n < n_r; ++n)
        state.update(alt, sampler.draw(alt));
    }
  }

  if (sampler.issued > plan.total)
    throw std::invalid_argument("seeding + exploration exceed total budget");
  greedy_phase(sampler, state, params.greedy_width(),
               plan.total - sampler.issued);
  if (out_state) *out_state = state;
  return finish(state, params.m, sampler.issued);
}

namespace {

// SAR core over an existing sampler/state; k-1 accept/reject phases with
// the log-bar sampling schedule, clipped to the given budget.
std::vector<std::uint32_t> sar_core(Sampler& sampler, SampleState& state,
                                    std::uint32_t m, std::uint64_t budget) {
  const std::uint32_t k = sampler.evaluator.k();
  if (m >= k) throw std::invalid_argument("SAR requires m < k");
  if (budget < k) throw std::invalid_argument("SAR requires budget >= k");
  double logbar = 0.5;
  for (std::uint32_t i = 2; i <= k; ++i) logbar += 1.0 / i;

  std::vector<std::uint32_t> active(k);
  std::iota(active.begin(), active.end(), 0u);
  std::vector<std::uint32_t> accepted;
  std::uint32_t to_accept = m;
  std::uint64_t n_prev = 0;
  const std::uint64_t start_budget = sampler.issued;

  for (std::uint32_t phase = 1; phase < k; ++phase) {
    const double raw = (static_cast<double>(budget) - k) /
                       (logbar * static_cast<double>(k + 1 - phase));
    const std::uint64_t n_phase = static_cast<std::uint64_t>(std::ceil(raw));
    if (phase == 1 && n_phase < 1)
      throw std::invalid_argument("budget too small for the SAR schedule");
    const std::uint64_t add = n_phase > n_prev ? n_phase - n_prev : 0;
    for (std::uint32_t alt : active) {
      for (std::uint64_t n = 0; n < add; ++n) {
        if (sampler.issued - start_budget >= budget) break;  // clip to budget
        state.update(alt, sampler.draw(alt));
      }
    }
    n_prev = std::max(n_prev, n_phase);

    // Rank active arms by mean (descending, lower index first).
    std::vector<std::uint32_t> ranked = active;
    std::sort(ranked.begin(), ranked.end(),
              [&](std::uint32_t a, std::uint32_t b) {
                if (state.mean(a) != state.mean(b))
                  return state.mean(a) > state.mean(b);
                return a < b;
              });
    const std::uint32_t n_active = static_cast<std::uint32_t>(ranked.size());
    // Empirical gap of each arm against the accept/reject frontier.
    double best_gap = -1.0;
    std::uint32_t best_rank = 0;
    for (std::uint32_t r = 0; r < n_active; ++r) {
      double gap;
      if (r < to_accept)
        gap = state.mean(ranked[r]) - state.mean(ranked[to_accept]);
      else
        gap = state.mean(ranked[to_accept - 1]) - state.mean(ranked[r]);
      if (gap > best_gap ||
          (gap == best_gap && ranked[r] < ranked[best_rank])) {
        best_gap = gap;
        best_rank = r;
      }
    }
    const std::uint32_t chosen = ranked[best_rank];
    if (best_rank < to_accept) {
      accepted.push_back(chosen);
      --to_accept;
    }
    active.erase(std::find(active.begin(), active.end(), chosen));
    if (to_accept == 0) break;
    if (active.size() == to_accept) {
      // remaining arms are all accepted
      for (std::uint32_t alt : active) accepted.push_back(alt);
      to_accept = 0;
      break;
    }
  }
  return accepted;
}

SelectionResult selection_from_subset(const SampleState& state,
                                      std::vector<std::uint32_t> subset,
                                      std::uint64_t consumed) {
  std::sort(subset.begin(), subset.end(),
            [&](std::uint32_t a, std::uint32_t b) {
              if (state.mean(a) != state.mean(b))
                return state.mean(a) > state.mean(b);
              return a < b;
            });
  SelectionResult result;
  result.selected = std::move(subset);
  for (std::uint32_t alt : result.selected) {
    result.terminal_means.push_back(state.mean(alt));
    result.terminal_counts.push_back(state.count(alt));
  }
  result.consumed_budget = consumed;
  return result;
}

}  // namespace

SelectionResult run_sar(const Evaluator& evaluator, std::uint32_t m,
                        std::uint64_t budget, std::uint64_t seed,
                        SampleState* out_state) {
  Sampler sampler(evaluator, seed);
  SampleState state(evaluator.k());
  std::vector<std::uint32_t> accepted = sar_core(sampler, state, m, budget);
  if (out_state) *out_state = state;
  return selection_from_subset(state, std::move(accepted), sampler.issued);
}

SelectionResult run_sar_M(const Evaluator& evaluator, const BudgetPlan& plan,
                          const EfgParams& params, std::uint64_t seed,
                          SampleState* out_state) {
  const std::uint32_t k = evaluator.k();
  plan.validate(k);
  Sampler sampler(evaluator, seed);
  SampleState state(k);
  const std::uint64_t explore_budget = plan.total - plan.greedy_total;
  sar_core(sampler, state, params.m, explore_budget);  // bookkeeping dropped
  // SAR may leave an arm unsampled only if clipped early; greedy selection
  // requires a count everywhere.
  for (std::uint32_t i = 0; i < k; ++i)
    if (state.count(i) == 0 && sampler.issued < plan.total)
      state.update(i, sampler.draw(i));
  greedy_phase(sampler, state, params.greedy_width(),
               plan.total - sampler.issued);
  if (out_state) *out_state = state;
  return finish(state, params.m, sampler.issued);
}

SelectionResult run_ocbam(const Evaluator& evaluator, std::uint32_t m,
                          std::uint64_t budget, const ComparatorParams& params,
                          std::uint64_t seed, SampleState* out_state) {
  const std::uint32_t k = evaluator.k();
  if (m >= k) throw std::invalid_argument("OCBAm requires m < k");
  const std::uint64_t n1 = std::max<std::uint64_t>(
      2, static_cast<std::uint64_t>(params.ocbam_n1_fraction *
                                    static_cast<double>(budget) / k));
  if (n1 * k > budget)
    throw std::invalid_argument("OCBAm initial phase exceeds budget");

  Sampler sampler(evaluator, seed);
  SampleState state(k);
  std::vector<double> m2(k, 0.0);  // Welford second moments
  auto observe = [&](std::uint32_t alt) {
    const double v = sampler.draw(alt);
    const double before = state.mean(alt);
    state.update(alt, v);
    m2[alt] += (v - before) * (v - state.mean(alt));
  };
  for (std::uint32_t i = 0; i < k; ++i)
    for (std::uint64_t n = 0; n < n1; ++n) observe(i);

  std::vector<double> weight(k);
  std::vector<std::uint32_t> order(k);
  while (sampler.issued < budget) {
    // OCBAm allocation: N_i proportional to (s_i / (Xbar_i - c))^2 with c
    // the midpoint between the m-th and (m+1)-th best current means.
    std::iota(order.begin(), order.end(), 0u);
    std::nth_element(order.begin(), order.begin() + m, order.end(),
                     [&](std::uint32_t a, std::uint32_t b) {
                       if (state.mean(a) != state.mean(b))
                         return state.mean(a) > state.mean(b);
                       return a < b;
                     });
    const std::uint32_t at_m = *std::max_element(
        order.begin(), order.begin() + m, [&](std::uint32_t a, std::uint32_t b) {
          return state.mean(a) > state.mean(b) ||
                 (state.mean(a) == state.mean(b) && a < b);
        });
    const std::uint32_t at_m1 = *std::min_element(
        order.begin() + m, order.end(), [&](std::uint32_t a, std::uint32_t b) {
          return state.mean(a) > state.mean(b) ||
                 (state.mean(a) == state.mean(b) && a < b);
        });
    const double c = 0.5 * (state.mean(at_m) + state.mean(at_m1));

    double total_weight = 0.0;
    for (std::uint32_t i = 0; i < k; ++i) {
      const double var =
          std::max(1e-12, m2[i] / static_cast<double>(state.count(i) - 1));
      const double gap = state.mean(i) - c;
      const double gap2 = std::max(1e-12, gap * gap);
      weight[i] = var / gap2;
      total_weight += weight[i];
    }
    std::uint32_t starving = 0;
    double best_short = -1e300;
    for (std::uint32_t i = 0; i < k; ++i) {
      const double target =
          static_cast<double>(budget) * weight[i] / total_weight;
      const double shortfall = target - static_cast<double>(state.count(i));
      if (shortfall > best_short) {
        best_short = shortfall;
        starving = i;
      }
    }
    const std::uint64_t batch = std::min<std::uint64_t>(
        params.ocbam_batch, budget - sampler.issued);
    for (std::uint64_t n = 0; n < batch; ++n) observe(starving);
  }
  if (out_state) *out_state = state;
  return finish(state, m, sampler.issued);
}

std::pair<std::uint64_t, std::uint64_t> consistent_budget(double alpha,
                                                          double sigma_bar,
                                                          double delta,
                                                          std::uint32_t m) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("alpha must lie in (0, 1)");
  if (sigma_bar <= 0.0 || delta <= 0.0 || m == 0)
    throw std::invalid_argument("sigma_bar, delta and m must be positive");
  const double s2 = sigma_bar * sigma_bar;
  const double n0 =
      8.0 * s2 / (delta * delta) * std::log(2.0 * m / alpha);
  const double ng = alpha / 2.0 + 4.0 * alpha * s2 / (delta * delta);
  return {static_cast<std::uint64_t>(std::ceil(n0)),
          static_cast<std::uint64_t>(std::ceil(ng))};
}

}  // namespace vscreen
