// Problem definitions, running statistics, selection primitives and the
// screening / ranking success predicates shared by every algorithm.
//
// Indices are 0-based everywhere, including file formats and CLI output.
// Ties in selection are broken by lower index.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vscreen {

struct ProblemInstance {
  std::uint32_t k = 0;  // number of alternatives
  std::uint32_t m = 0;  // subset size, 1 <= m < k
  double delta = 0.0;   // indifference-zone parameter
  std::optional<std::vector<double>> true_means;
  std::string evaluator_id;

  void validate() const;  // throws std::invalid_argument on violation
};

// Per-alternative running counts and means; the algorithms' only statistics.
// Running means use compensated accumulation so drift stays bounded over
// millions of updates.  Value object; single-writer, no internal locking.
class SampleState {
 public:
  SampleState() = default;
  explicit SampleState(std::uint32_t k)
      : counts_(k, 0), means_(k, 0.0), comp_(k, 0.0) {}

  std::uint32_t k() const { return static_cast<std::uint32_t>(counts_.size()); }
  std::uint64_t total() const { return total_; }
  std::uint64_t count(std::uint32_t alt) const { return counts_[alt]; }
  double mean(std::uint32_t alt) const { return means_[alt]; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  const std::vector<double>& means() const { return means_; }

  void update(std::uint32_t alt, double value);

 private:
  std::vector<std::uint64_t> counts_;
  std::vector<double> means_;
  std::vector<double> comp_;  // Kahan-style correction per alternative
  std::uint64_t total_ = 0;
};

struct BudgetPlan {
  std::uint64_t total = 0;            // B
  std::uint32_t seeding_per_alt = 0;  // n_sd
  std::uint32_t explore_per_alt = 0;  // n0
  std::uint64_t greedy_total = 0;     // greedy tranche in raw observations

  // total = (seeding_per_alt + explore_per_alt) * k + greedy_total
  void validate(std::uint32_t k) const;
};

// Budget B = c*k split into tranches by fractions of B.  Per-alternative
// tranches are floored; the greedy tranche absorbs the integer remainder.
BudgetPlan split_budget(std::uint64_t total, std::uint32_t k,
                        double seeding_fraction, double greedy_fraction);

struct SelectionResult {
  std::vector<std::uint32_t> selected;  // descending terminal mean
  std::vector<double> terminal_means;
  std::vector<std::uint64_t> terminal_counts;
  std::uint64_t consumed_budget = 0;
};

struct GoodSet {
  std::vector<std::uint32_t> members;  // sorted ascending
  double threshold = 0.0;              // mu_m - delta

  bool contains(std::uint32_t alt) const;
};

enum class IbrRelation { indifferent, a_dominates, b_dominates };

// Incremental running-average update; first observation sets the mean.
void update_mean(SampleState& state, std::uint32_t alt, double value);

// Indices of the top-m sample means in descending order, lower index first
// on ties.  Every alternative must have at least one observation.
std::vector<std::uint32_t> top_m_select(const SampleState& state,
                                        std::uint32_t m);

// Same selection rule applied to a raw mean vector (no count precondition).
std::vector<std::uint32_t> top_m_indices(const std::vector<double>& means,
                                         std::uint32_t m);

// All indices whose mean is >= (m-th largest mean) - delta.  Boundary
// equality counts as good.
GoodSet good_set(const std::vector<double>& means, std::uint32_t m,
                 double delta);

// True iff every selected index is a member of the good set.
bool is_good_screening(const SelectionResult& result, const GoodSet& good);

// True iff for every ordered pair of selected indices with a true-mean gap
// strictly above delta, the terminal sample means are ordered consistently.
bool is_good_ranking(const SelectionResult& result,
                     const std::vector<double>& true_means, double delta);

IbrRelation ibr_relation(double mu_a, double mu_b, double delta);

// B = floor(M / h)
std::uint64_t budget_from_money(double money, double cost_per_query);

}  // namespace vscreen
