#include "vscreen/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace vscreen {

void ProblemInstance::validate() const {
  if (m < 1 || m >= k) throw std::invalid_argument("require 1 <= m < k");
  if (delta < 0.0) throw std::invalid_argument("delta must be nonnegative");
  if (true_means && true_means->size() != k)
    throw std::invalid_argument("true_means length must equal k");
}

void SampleState::update(std::uint32_t alt, double value) {
  if (alt >= counts_.size()) throw std::invalid_argument("alternative index out of range");
  const double n1 = static_cast<double>(counts_[alt] + 1);
  const double delta = (value - means_[alt]) / n1;
  // Kahan-compensated addition of the increment.
  const double y = delta - comp_[alt];
  const double t = means_[alt] + y;
  comp_[alt] = (t - means_[alt]) - y;
  means_[alt] = t;
  counts_[alt] += 1;
  total_ += 1;
}

void update_mean(SampleState& state, std::uint32_t alt, double value) {
  state.update(alt, value);
}

void BudgetPlan::validate(std::uint32_t k) const {
  const std::uint64_t fixed =
      static_cast<std::uint64_t>(seeding_per_alt + explore_per_alt) * k;
  if (fixed + greedy_total != total)
    throw std::invalid_argument("budget plan tranches do not sum to total");
}

BudgetPlan split_budget(std::uint64_t total, std::uint32_t k,
                        double seeding_fraction, double greedy_fraction) {
  if (k == 0) throw std::invalid_argument("k must be positive");
  if (seeding_fraction < 0.0 || greedy_fraction < 0.0 ||
      seeding_fraction + greedy_fraction >= 1.0)
    throw std::invalid_argument("fractions must be nonnegative and sum below 1");
  BudgetPlan plan;
  plan.total = total;
  plan.seeding_per_alt = static_cast<std::uint32_t>(
      std::floor(seeding_fraction * static_cast<double>(total) / k));
  const double explore_fraction = 1.0 - seeding_fraction - greedy_fraction;
  plan.explore_per_alt = static_cast<std::uint32_t>(
      std::floor(explore_fraction * static_cast<double>(total) / k));
  const std::uint64_t fixed =
      static_cast<std::uint64_t>(plan.seeding_per_alt + plan.explore_per_alt) * k;
  if (fixed > total) throw std::invalid_argument("budget too small for split");
  plan.greedy_total = total - fixed;
  if (plan.explore_per_alt < 1)
    throw std::invalid_argument("budget too small: exploration below 1 per alternative");
  return plan;
}

bool GoodSet::contains(std::uint32_t alt) const {
  return std::binary_search(members.begin(), members.end(), alt);
}

namespace {

// Comparator for (mean desc, index asc).
struct MeanOrder {
  const std::vector<double>& means;
  bool operator()(std::uint32_t a, std::uint32_t b) const {
    if (means[a] != means[b]) return means[a] > means[b];
    return a < b;
  }
};

std::vector<std::uint32_t> select_top(const std::vector<double>& means,
                                      std::uint32_t m) {
  std::vector<std::uint32_t> idx(means.size());
  std::iota(idx.begin(), idx.end(), 0u);
  std::partial_sort(idx.begin(), idx.begin() + m, idx.end(), MeanOrder{means});
  idx.resize(m);
  return idx;
}

}  // namespace

std::vector<std::uint32_t> top_m_select(const SampleState& state,
                                        std::uint32_t m) {
  if (m > state.k()) throw std::invalid_argument("m exceeds number of alternatives");
  for (std::uint32_t i = 0; i < state.k(); ++i)
    if (state.count(i) == 0)
      throw std::invalid_argument("top_m_select requires every alternative sampled");
  return select_top(state.means(), m);
}

std::vector<std::uint32_t> top_m_indices(const std::vector<double>& means,
                                         std::uint32_t m) {
  if (m > means.size()) throw std::invalid_argument("m exceeds vector length");
  return select_top(means, m);
}

GoodSet good_set(const std::vector<double>& means, std::uint32_t m,
                 double delta) {
  if (m == 0 || m > means.size())
    throw std::invalid_argument("m must be in [1, means.size()]");
  if (delta < 0.0) throw std::invalid_argument("delta must be nonnegative");
  std::vector<double> sorted(means);
  std::nth_element(sorted.begin(), sorted.begin() + (m - 1), sorted.end(),
                   std::greater<double>());
  GoodSet good;
  good.threshold = sorted[m - 1] - delta;
  for (std::uint32_t i = 0; i < means.size(); ++i)
    if (means[i] >= good.threshold) good.members.push_back(i);
  return good;
}

bool is_good_screening(const SelectionResult& result, const GoodSet& good) {
  for (std::uint32_t alt : result.selected)
    if (!good.contains(alt)) return false;
  return true;
}

bool is_good_ranking(const SelectionResult& result,
                     const std::vector<double>& true_means, double delta) {
  if (true_means.empty()) throw std::invalid_argument("true means required");
  const auto& sel = result.selected;
  // selected is ordered by terminal mean descending; a pair violates the
  // ranking iff the dominated alternative appears first.  Strict ">" on the
  // true-mean gap per the PGSR definition.
  for (std::size_t a = 0; a < sel.size(); ++a) {
    for (std::size_t b = 0; b < sel.size(); ++b) {
      if (a == b) continue;
      if (true_means[sel[a]] - true_means[sel[b]] > delta) {
        // i=sel[a] dominates j=sel[b]; require terminal mean of i strictly
        // above that of j.
        if (!(result.terminal_means[a] > result.terminal_means[b]))
          return false;
      }
    }
  }
  return true;
}

IbrRelation ibr_relation(double mu_a, double mu_b, double delta) {
  if (delta < 0.0) throw std::invalid_argument("delta must be nonnegative");
  if (mu_a - mu_b >= delta) return IbrRelation::a_dominates;
  if (mu_b - mu_a >= delta) return IbrRelation::b_dominates;
  return IbrRelation::indifferent;
}

std::uint64_t budget_from_money(double money, double cost_per_query) {
  if (cost_per_query <= 0.0)
    throw std::invalid_argument("cost per query must be positive");
  if (money < 0.0) throw std::invalid_argument("money must be nonnegative");
  return static_cast<std::uint64_t>(std::floor(money / cost_per_query));
}

}  // namespace vscreen
