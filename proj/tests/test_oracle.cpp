#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "vscreen/core.hpp"
#include "vscreen/oracle.hpp"

using namespace vscreen;

TEST_CASE("running averages and crossing on a worked stream") {
  // values 10,0,0,0 -> averages 10, 5, 10/3, 2.5
  const StreamAnalysis a =
      analyze_stream({10, 0, 0, 0}, 1, 0.0, {2.5, 11.0, 1.0}, {});
  REQUIRE(a.running_avg.size() == 4);
  CHECK(a.running_avg[0] == doctest::Approx(10.0));
  CHECK(a.running_avg[3] == doctest::Approx(2.5));
  CHECK(a.min_running_avg == doctest::Approx(2.5));
  CHECK(a.argmin_index == 4);
  CHECK(a.crossing_times.at(2.5) == 4);   // boundary touch counts
  CHECK(a.crossing_times.at(11.0) == 1);  // already below at n0
  CHECK_FALSE(a.crossing_times.at(1.0).has_value());
}

TEST_CASE("constant stream crosses its own level immediately") {
  const StreamAnalysis a = analyze_stream({3, 3, 3, 3, 3}, 2, 3.0, {3.0}, {0.5});
  CHECK(a.min_running_avg == doctest::Approx(3.0));
  CHECK(a.argmin_index == 2);  // first index considered
  CHECK(a.crossing_times.at(3.0) == 2);
  CHECK_FALSE(a.last_exit.at(0.5).has_value());  // never leaves the band
}

TEST_CASE("last exit time picks the final excursion") {
  // averages: 2, 1, 2/3, 0.5, 0.4 with mu=0.5, radius 0.4:
  // |avg-mu| >= 0.4 at n=1 (1.5) and n=2 (0.5); later deviations are smaller
  const StreamAnalysis a = analyze_stream({2, 0, 0, 0, 0}, 1, 0.5, {}, {0.4});
  CHECK(a.last_exit.at(0.4) == 2);
}

TEST_CASE("argmin respects the first-index cutoff") {
  // minimum before n0 is ignored
  const StreamAnalysis a = analyze_stream({-5, 10, 10, 10}, 2, 0.0, {}, {});
  CHECK(a.argmin_index == 2);
  CHECK(a.min_running_avg == doctest::Approx(2.5));
  CHECK_THROWS_AS(analyze_stream({}, 1, 0.0, {}, {}), std::invalid_argument);
  CHECK_THROWS_AS(analyze_stream({1.0}, 2, 0.0, {}, {}), std::invalid_argument);
}

TEST_CASE("ordered good minima selects the m-th largest minimum") {
  std::vector<StreamAnalysis> analyses;
  for (double level : {5.0, 3.0, 4.0, 1.0})
    analyses.push_back(analyze_stream({level, level}, 1, 0.0, {}, {}));
  CHECK(ordered_good_minima(analyses, 1) == doctest::Approx(5.0));
  CHECK(ordered_good_minima(analyses, 2) == doctest::Approx(4.0));
  CHECK(ordered_good_minima(analyses, 4) == doctest::Approx(1.0));
  CHECK_THROWS_AS(ordered_good_minima(analyses, 5), std::invalid_argument);
  CHECK_THROWS_AS(ordered_good_minima(analyses, 0), std::invalid_argument);
}

TEST_CASE("sufficient budget bracket on a constructed path") {
  // two good constant streams at 5 and 4, one inferior stream decaying
  // below the boundary 4 at its third observation
  std::vector<StreamAnalysis> analyses;
  analyses.push_back(analyze_stream({5, 5, 5, 5, 5, 5}, 1, 0.0, {}, {}));
  analyses.push_back(analyze_stream({4, 4, 4, 4, 4, 4}, 1, 0.0, {}, {}));
  analyses.push_back(analyze_stream({6, 5, 1, 1, 1, 1}, 1, 0.0, {}, {}));
  GoodSet good;
  good.members = {0, 1};
  good.threshold = 4.0;
  const SufficientBudget sb =
      sufficient_budget_for_good_screening(analyses, good, 1, 2);
  CHECK(sb.conclusive);
  CHECK(sb.boundary == doctest::Approx(4.0));
  // inferior crossing at n=3 ((6+5+1)/3 = 4), good argmins at 1 each:
  // bracket = 3 + 1 + 1 - 1*3 = 2, tranche = m * 2 = 4
  CHECK(sb.greedy_tranche == 4);
}

TEST_CASE("sufficient budget reports inconclusive paths") {
  std::vector<StreamAnalysis> analyses;
  analyses.push_back(analyze_stream({5, 5, 5}, 1, 0.0, {}, {}));
  analyses.push_back(analyze_stream({4, 4, 4}, 1, 0.0, {}, {}));
  // inferior stream that never reaches the boundary within the horizon
  analyses.push_back(analyze_stream({4.5, 4.5, 4.5}, 1, 0.0, {}, {}));
  GoodSet good;
  good.members = {0, 1};
  good.threshold = 4.0;
  CHECK_FALSE(
      sufficient_budget_for_good_screening(analyses, good, 1, 2).conclusive);

  // good argmin touching the horizon is also inconclusive
  std::vector<StreamAnalysis> decaying;
  decaying.push_back(analyze_stream({5, 4.5, 4.2}, 1, 0.0, {}, {}));
  decaying.push_back(analyze_stream({4, 4, 4}, 1, 0.0, {}, {}));
  decaying.push_back(analyze_stream({1, 1, 1}, 1, 0.0, {}, {}));
  CHECK_FALSE(
      sufficient_budget_for_good_screening(decaying, good, 1, 2).conclusive);
}

TEST_CASE("boundary crossing time estimator") {
  // z far above 0: the average is below z at the first considered index
  const CBoundaryEstimate fast = estimate_C(10.0, 3, 500, 1000, 1);
  CHECK(fast.estimate == doctest::Approx(3.0));
  CHECK(fast.truncation_fraction == 0.0);

  // monotone in z: lower boundaries take longer to cross
  const CBoundaryEstimate c_hi = estimate_C(1.0, 1, 2000, 100000, 2);
  const CBoundaryEstimate c_lo = estimate_C(0.0, 1, 2000, 100000, 2);
  CHECK(c_hi.estimate < c_lo.estimate);
  CHECK(c_hi.standard_error > 0.0);

  // tight horizon forces truncation on a hard boundary
  const CBoundaryEstimate trunc = estimate_C(-3.0, 1, 200, 50, 3);
  CHECK(trunc.truncation_fraction > 0.5);
  CHECK_THROWS_AS(estimate_C(1.0, 0, 10, 10, 0), std::invalid_argument);
}
