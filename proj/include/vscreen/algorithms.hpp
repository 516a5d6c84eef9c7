// Budget-allocation algorithms: the explore-first top-m/top-M greedy family
// (with optional seeding groups), plus the SAR and OCBAm comparators and the
// SAR + greedy composition.  Every run consumes an Evaluator and a budget
// and emits a SelectionResult plus the full SampleState.
#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "vscreen/core.hpp"
#include "vscreen/evaluators.hpp"

namespace vscreen {

struct EfgParams {
  std::uint32_t m = 10;
  std::uint32_t M = 0;  // greedy width; 0 means M = m
  std::optional<std::uint32_t> group_count;  // EFG-M+ G override

  std::uint32_t greedy_width() const { return M == 0 ? m : M; }
};

struct ComparatorParams {
  double ocbam_n1_fraction = 0.4;
  std::uint32_t ocbam_batch = 10;
};

// Exploration-group layout of the seeding-enhanced algorithm: group sizes
// double from group 1 to G; per-alternative exploration sample n^r halves.
struct SeedingPlan {
  std::uint32_t group_count = 0;  // G
  // [begin, end) rank ranges over the seeded descending ranking
  std::vector<std::pair<std::uint32_t, std::uint32_t>> group_ranges;
  std::vector<std::uint32_t> per_group_sample;  // n^r
};

SeedingPlan make_seeding_plan(std::uint32_t k, std::uint32_t m,
                              std::uint32_t n0,
                              std::optional<std::uint32_t> group_override);

SelectionResult run_efg_m(const Evaluator& evaluator, const BudgetPlan& plan,
                          const EfgParams& params, std::uint64_t seed,
                          SampleState* out_state = nullptr);

SelectionResult run_efg_M(const Evaluator& evaluator, const BudgetPlan& plan,
                          const EfgParams& params, std::uint64_t seed,
                          SampleState* out_state = nullptr);

SelectionResult run_efg_M_plus(const Evaluator& evaluator,
                               const BudgetPlan& plan, const EfgParams& params,
                               std::uint64_t seed,
                               SampleState* out_state = nullptr);

SelectionResult run_sar(const Evaluator& evaluator, std::uint32_t m,
                        std::uint64_t budget, std::uint64_t seed,
                        SampleState* out_state = nullptr);

SelectionResult run_ocbam(const Evaluator& evaluator, std::uint32_t m,
                          std::uint64_t budget, const ComparatorParams& params,
                          std::uint64_t seed,
                          SampleState* out_state = nullptr);

// SAR on the exploration tranche (accept/reject bookkeeping discarded,
// statistics retained), then top-M greedy on the remainder.
SelectionResult run_sar_M(const Evaluator& evaluator, const BudgetPlan& plan,
                          const EfgParams& params, std::uint64_t seed,
                          SampleState* out_state = nullptr);

// Closed-form budget parameters guaranteeing PGS >= 1 - alpha:
//   n0  = ceil( (8*sigma_bar^2 / delta^2) * log(2m / alpha) )
//   n_g = ceil( alpha/2 + 4*alpha*sigma_bar^2 / delta^2 )
std::pair<std::uint64_t, std::uint64_t> consistent_budget(double alpha,
                                                          double sigma_bar,
                                                          double delta,
                                                          std::uint32_t m);

}  // namespace vscreen
