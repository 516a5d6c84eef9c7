// Python bindings for the screening library's main operations.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vscreen/algorithms.hpp"
#include "vscreen/core.hpp"
#include "vscreen/evaluators.hpp"
#include "vscreen/harness.hpp"
#include "vscreen/oracle.hpp"

namespace py = pybind11;
using namespace vscreen;

namespace {

SelectionResult run_synthetic(const std::string& row, std::uint32_t k,
                              std::uint32_t m, double gap,
                              const std::string& algorithm, std::uint64_t total,
                              double seeding_fraction, double greedy_fraction,
                              std::uint32_t M, std::uint64_t seed) {
  auto evaluator = build_synthetic(synthetic_row(row, k, m, gap, seed));
  EfgParams params;
  params.m = m;
  params.M = M;
  if (algorithm == "efg-m") {
    return run_efg_m(*evaluator,
                     split_budget(total, k, 0.0, greedy_fraction), params,
                     seed);
  }
  if (algorithm == "efg-big-m") {
    return run_efg_M(*evaluator,
                     split_budget(total, k, 0.0, greedy_fraction), params,
                     seed);
  }
  if (algorithm == "efg-big-m-plus") {
    return run_efg_M_plus(
        *evaluator, split_budget(total, k, seeding_fraction, greedy_fraction),
        params, seed);
  }
  if (algorithm == "sar") return run_sar(*evaluator, m, total, seed);
  if (algorithm == "ocbam")
    return run_ocbam(*evaluator, m, total, ComparatorParams{}, seed);
  throw std::invalid_argument("unknown algorithm: " + algorithm);
}

}  // namespace

PYBIND11_MODULE(_vscreen, mod) {
  mod.doc() = "budget-allocation algorithms for top-m subset screening";

  py::class_<SelectionResult>(mod, "SelectionResult")
      .def_readonly("selected", &SelectionResult::selected)
      .def_readonly("terminal_means", &SelectionResult::terminal_means)
      .def_readonly("terminal_counts", &SelectionResult::terminal_counts)
      .def_readonly("consumed_budget", &SelectionResult::consumed_budget);

  py::class_<GoodSet>(mod, "GoodSet")
      .def_readonly("members", &GoodSet::members)
      .def_readonly("threshold", &GoodSet::threshold)
      .def("contains", &GoodSet::contains);

  mod.def("top_m_indices", &top_m_indices, py::arg("means"), py::arg("m"));
  mod.def("good_set", &good_set, py::arg("means"), py::arg("m"),
          py::arg("delta"));
  mod.def(
      "ibr_relation",
      [](double a, double b, double delta) {
        switch (ibr_relation(a, b, delta)) {
          case IbrRelation::a_dominates: return "a_dominates";
          case IbrRelation::b_dominates: return "b_dominates";
          default: return "indifferent";
        }
      },
      py::arg("mu_a"), py::arg("mu_b"), py::arg("delta"));
  mod.def("consistent_budget", &consistent_budget, py::arg("alpha"),
          py::arg("sigma_bar"), py::arg("delta"), py::arg("m"));
  mod.def(
      "enumerate_allocations",
      [](std::uint32_t L, bool equality_mode) {
        std::vector<std::vector<std::uint32_t>> out;
        for (const auto& x : enumerate_allocations(L, equality_mode))
          out.emplace_back(x.begin(), x.end());
        return out;
      },
      py::arg("L"), py::arg("equality_mode") = false);
  mod.def("run_synthetic", &run_synthetic, py::arg("row"), py::arg("k"),
          py::arg("m"), py::arg("gap"), py::arg("algorithm"), py::arg("total"),
          py::arg("seeding_fraction") = 0.0, py::arg("greedy_fraction") = 0.2,
          py::arg("M") = 0, py::arg("seed") = 0);
  mod.def(
      "estimate_C",
      [](double z, std::uint32_t n0, std::uint64_t reps, std::uint64_t horizon,
         std::uint64_t seed) {
        const CBoundaryEstimate est = estimate_C(z, n0, reps, horizon, seed);
        return py::make_tuple(est.estimate, est.standard_error,
                              est.truncation_fraction);
      },
      py::arg("z"), py::arg("n0"), py::arg("reps") = 10000,
      py::arg("horizon") = 1000000, py::arg("seed") = 0);
  mod.def(
      "analyze_stream",
      [](const std::vector<double>& values, std::uint32_t n0, double mu,
         const std::vector<double>& boundaries,
         const std::vector<double>& radii) {
        const StreamAnalysis a = analyze_stream(values, n0, mu, boundaries,
                                                radii);
        py::dict out;
        out["min_running_avg"] = a.min_running_avg;
        out["argmin_index"] = a.argmin_index;
        py::dict crossings;
        for (const auto& [b, t] : a.crossing_times)
          crossings[py::float_(b)] =
              t ? py::object(py::int_(*t)) : py::object(py::none());
        out["crossing_times"] = crossings;
        py::dict exits;
        for (const auto& [r, t] : a.last_exit)
          exits[py::float_(r)] =
              t ? py::object(py::int_(*t)) : py::object(py::none());
        out["last_exit"] = exits;
        return out;
      },
      py::arg("values"), py::arg("n0") = 1, py::arg("mu") = 0.0,
      py::arg("boundaries") = std::vector<double>{},
      py::arg("radii") = std::vector<double>{});
  mod.def(
      "run_experiment_json",
      [](const std::string& config_json, std::uint32_t jobs) {
        const ExperimentResult result =
            run_experiment(ExperimentConfig::from_json(config_json), jobs);
        py::dict out;
        out["digest"] = result.digest;
        py::dict metrics;
        for (const auto& m : result.metrics)
          metrics[py::str(m.metric)] =
              py::make_tuple(m.estimate, m.standard_error, m.replications);
        out["metrics"] = metrics;
        out["wall_clock_ms"] = result.wall_clock_ms;
        return out;
      },
      py::arg("config_json"), py::arg("jobs") = 1);
}
