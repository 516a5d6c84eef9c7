#include "vscreen/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vscreen/rng.hpp"

namespace vscreen {

StreamAnalysis analyze_stream(const std::vector<double>& values,
                              std::uint32_t n0, double mu,
                              const std::vector<double>& boundaries,
                              const std::vector<double>& radii) {
  if (values.empty()) throw std::invalid_argument("empty stream");
  if (n0 < 1 || n0 > values.size())
    throw std::invalid_argument("require 1 <= n0 <= horizon");
  StreamAnalysis a;
  a.n0 = n0;
  a.horizon = values.size();
  a.running_avg.resize(values.size());
  double sum = 0.0;
  for (std::size_t n = 0; n < values.size(); ++n) {
    sum += values[n];
    a.running_avg[n] = sum / static_cast<double>(n + 1);
  }
  a.min_running_avg = a.running_avg[n0 - 1];
  a.argmin_index = n0;
  for (std::uint64_t n = n0; n <= a.horizon; ++n) {
    const double avg = a.running_avg[n - 1];
    if (avg < a.min_running_avg) {
      a.min_running_avg = avg;
      a.argmin_index = n;
    }
  }
  for (double b : boundaries) {
    std::optional<std::uint64_t> crossed;
    for (std::uint64_t n = n0; n <= a.horizon; ++n) {
      if (a.running_avg[n - 1] <= b) {
        crossed = n;
        break;
      }
    }
    a.crossing_times[b] = crossed;
  }
  for (double r : radii) {
    std::optional<std::uint64_t> last;
    for (std::uint64_t n = n0; n <= a.horizon; ++n)
      if (std::abs(a.running_avg[n - 1] - mu) >= r) last = n;
    a.last_exit[r] = last;
  }
  return a;
}

double ordered_good_minima(const std::vector<StreamAnalysis>& analyses,
                           std::uint32_t m) {
  if (m == 0 || analyses.size() < m)
    throw std::invalid_argument("require 1 <= m <= number of analyses");
  std::vector<double> minima;
  minima.reserve(analyses.size());
  for (const auto& a : analyses) minima.push_back(a.min_running_avg);
  std::nth_element(minima.begin(), minima.begin() + (m - 1), minima.end(),
                   std::greater<double>());
  return minima[m - 1];
}

SufficientBudget sufficient_budget_for_good_screening(
    const std::vector<StreamAnalysis>& analyses, const GoodSet& good,
    std::uint32_t n0, std::uint32_t m) {
  const std::uint32_t k = static_cast<std::uint32_t>(analyses.size());
  SufficientBudget result;

  std::vector<StreamAnalysis> good_analyses;
  for (std::uint32_t i = 0; i < k; ++i)
    if (good.contains(i)) good_analyses.push_back(analyses[i]);
  if (good_analyses.size() < m)
    throw std::invalid_argument("good set smaller than m");
  result.boundary = ordered_good_minima(good_analyses, m);

  double inferior_sum = 0.0;
  double good_sum = 0.0;
  for (std::uint32_t i = 0; i < k; ++i) {
    const auto& a = analyses[i];
    if (good.contains(i)) {
      // argmin interior to the horizon, else the true minimum may lie beyond
      if (a.argmin_index >= a.horizon) return result;
      good_sum += static_cast<double>(a.argmin_index);
    } else {
      std::optional<std::uint64_t> crossing;
      // first n >= n0 with running average <= boundary
      for (std::uint64_t n = n0; n <= a.horizon; ++n) {
        if (a.running_avg[n - 1] <= result.boundary) {
          crossing = n;
          break;
        }
      }
      if (!crossing) return result;  // inconclusive
      inferior_sum += static_cast<double>(*crossing);
    }
  }
  const double bracket =
      inferior_sum + good_sum - static_cast<double>(n0) * k;
  result.conclusive = true;
  result.greedy_tranche = static_cast<std::uint64_t>(
      m * std::max(0.0, bracket));
  return result;
}

CBoundaryEstimate estimate_C(double z, std::uint32_t n0, std::uint64_t reps,
                             std::uint64_t horizon, std::uint64_t seed) {
  if (n0 < 1) throw std::invalid_argument("n0 must be >= 1");
  CBoundaryEstimate est;
  est.z = z;
  est.n0 = n0;
  est.reps = reps;
  est.horizon = horizon;
  double mean = 0.0, m2 = 0.0;
  std::uint64_t truncated = 0;
  for (std::uint64_t r = 0; r < reps; ++r) {
    Rng rng(derive_seed(hash_combine(seed, 0xC0Fu), r));
    double sum = 0.0;
    std::uint64_t crossing = horizon;
    bool crossed = false;
    for (std::uint64_t n = 1; n <= horizon; ++n) {
      sum += rng.next_normal();
      if (n >= n0 && sum <= z * static_cast<double>(n)) {
        crossing = n;
        crossed = true;
        break;
      }
    }
    if (!crossed) ++truncated;
    const double v = static_cast<double>(crossing);
    const double d = v - mean;
    mean += d / static_cast<double>(r + 1);
    m2 += d * (v - mean);
  }
  est.estimate = mean;
  est.standard_error =
      reps > 1 ? std::sqrt(m2 / static_cast<double>(reps - 1) /
                           static_cast<double>(reps))
               : 0.0;
  est.truncation_fraction =
      static_cast<double>(truncated) / static_cast<double>(reps);
  return est;
}

}  // namespace vscreen
