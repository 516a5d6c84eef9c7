// Offline boundary-crossing computations on recorded streams, used as test
// oracles for the greedy algorithms, plus the Monte Carlo estimator of the
// expected boundary-crossing time of a standard-normal running average.
//
// Infinite-horizon quantities are approximated over the stream's finite
// horizon; every result carries an explicit finite-horizon flag.  Tests that
// need exact values use constructed deterministic streams.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "vscreen/core.hpp"

namespace vscreen {

struct StreamAnalysis {
  std::vector<double> running_avg;      // running_avg[n-1] = mean of first n
  double min_running_avg = 0.0;         // over [n0, H]
  std::uint64_t argmin_index = 0;       // 1-based n attaining the minimum
  // first n in [n0, H] with running_avg(n) <= boundary
  std::map<double, std::optional<std::uint64_t>> crossing_times;
  // last n in [n0, H] with |running_avg(n) - mu| >= radius; nullopt when the
  // average never leaves the band after n0
  std::map<double, std::optional<std::uint64_t>> last_exit;
  std::uint64_t horizon = 0;
  std::uint32_t n0 = 1;
  bool finite_horizon = true;
};

StreamAnalysis analyze_stream(const std::vector<double>& values,
                              std::uint32_t n0, double mu,
                              const std::vector<double>& boundaries,
                              const std::vector<double>& radii);

// m-th largest finite-horizon minimum running average over the good set.
double ordered_good_minima(const std::vector<StreamAnalysis>& analyses,
                           std::uint32_t m);

struct SufficientBudget {
  bool conclusive = false;
  std::uint64_t greedy_tranche = 0;  // minimal greedy budget guaranteeing
                                     // good screening on this sample path
  double boundary = 0.0;             // the m-th largest good minimum
};

// Evaluates the sufficient-budget bracket on one sample path:
//   m * [ sum_{i not good} N_i(boundary; n0) + sum_{j good} argmin_j - n0*k ]+
// "inconclusive" when an inferior alternative never crosses within the
// horizon or a good argmin touches the horizon.
SufficientBudget sufficient_budget_for_good_screening(
    const std::vector<StreamAnalysis>& analyses, const GoodSet& good,
    std::uint32_t n0, std::uint32_t m);

struct CBoundaryEstimate {
  double z = 0.0;
  std::uint32_t n0 = 1;
  std::uint64_t reps = 0;
  std::uint64_t horizon = 0;
  double estimate = 0.0;             // Monte Carlo mean crossing time
  double standard_error = 0.0;
  double truncation_fraction = 0.0;  // paths not crossed by the horizon
};

// Monte Carlo estimate of C(z; n0) = E[inf{n >= n0 : Zbar(n) <= z}] for a
// standard-normal running average.  Uncrossed paths contribute the horizon.
CBoundaryEstimate estimate_C(double z, std::uint32_t n0,
                             std::uint64_t reps = 10000,
                             std::uint64_t horizon = 1000000,
                             std::uint64_t seed = 0);

}  // namespace vscreen
