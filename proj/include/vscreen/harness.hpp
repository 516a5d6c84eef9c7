// Macro-replication experiment harness: runs a configured algorithm R
// times with derived per-replication seeds, scores each run against the
// problem's true means, and reports PCS / PGS / PGSR with binomial
// standard errors.  Results append to a tidy CSV keyed by a config digest.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vscreen/algorithms.hpp"
#include "vscreen/core.hpp"
#include "vscreen/evaluators.hpp"

namespace vscreen {

struct ProblemSpec {
  std::string kind = "synthetic";  // synthetic | redundancy | empirical
  // synthetic
  std::string row = "sc-normal";
  std::uint32_t k = 0;
  double gap = 0.1;  // gamma (SC) or delta (RM); also the scoring delta
  std::uint32_t g = 15;
  std::uint64_t instance_seed = 0;  // drives RM offset draws
  // redundancy
  std::uint32_t L = 13;
  bool equality_mode = false;
  std::uint64_t mean_reps = 30000;  // draws per alternative for true means
  std::string cache_dir = ".vscreen-cache";
  // empirical
  std::string dataset_path;
};

struct AlgorithmSpec {
  // efg-m | efg-big-m | efg-big-m-plus | efg-async | sar | sar-big-m | ocbam
  std::string id = "efg-m";
  std::uint32_t m = 10;
  double M_ratio = 2.0;  // greedy width M = round(M_ratio * m)
  std::optional<std::uint32_t> group_count;
  std::uint32_t workers = 1;       // efg-async
  double latency_max_ms = 1.0;     // efg-async
  ComparatorParams comparator;
};

struct BudgetSpec {
  double c = 0.0;           // B = c * k when positive
  std::uint64_t total = 0;  // explicit B otherwise
  double seeding_fraction = 0.0;
  double greedy_fraction = 0.2;

  std::uint64_t resolve_total(std::uint32_t k) const;
};

struct ExperimentConfig {
  ProblemSpec problem;
  AlgorithmSpec algorithm;
  BudgetSpec budget;
  std::uint64_t replications = 100;
  std::uint64_t seed = 0;
  std::string out_path;  // optional CSV target

  std::string to_json() const;
  static ExperimentConfig from_json(const std::string& text);
};

// FNV-1a over the canonical JSON form.
std::string config_digest(const ExperimentConfig& config);

struct MetricEstimate {
  std::string metric;  // PCS | PGS | PGSR
  double estimate = 0.0;
  double standard_error = 0.0;  // sqrt(p(1-p)/R)
  std::uint64_t successes = 0;
  std::uint64_t replications = 0;
};

struct ExperimentResult {
  std::string digest;
  std::vector<MetricEstimate> metrics;
  double wall_clock_ms = 0.0;
  double mean_utilization = 0.0;  // efg-async only
};

// Evaluator plus the scoring ground truth for one problem spec.
struct ProblemBundle {
  std::shared_ptr<Evaluator> evaluator;
  std::vector<double> true_means;  // exact or high-replication estimates
  bool means_are_offsets_only = false;
  double delta = 0.0;
  std::uint32_t k = 0;
};

ProblemBundle build_problem(const ProblemSpec& spec, std::uint32_t m);

// True means of the redundancy simulator, cached on disk keyed by the
// problem parameters, replication count and seed.
std::vector<double> redundancy_true_means(const RedundancyProblem& problem,
                                          std::uint64_t reps,
                                          std::uint64_t seed,
                                          const std::string& cache_dir);

struct ReplicationScore {
  bool correct = false;      // selected set is exactly the true top-m
  bool good_screen = false;  // every selected mean within delta of the m-th
  bool good_rank = false;    // good screening plus consistent ordering
};

ReplicationScore score_replication(const SelectionResult& result,
                                   const std::vector<double>& true_means,
                                   std::uint32_t m, double delta);

// Runs R replications (seeds derived from config.seed), optionally across
// a thread pool, and appends a CSV row per metric to config.out_path.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                std::uint32_t jobs = 1);

// Re-runs the experiment once per axis value, patching the named field
// (k | c | B | gap | m | M_ratio | workers | L) before each run.
struct SweepSpec {
  std::string axis;
  std::vector<double> values;
};
std::vector<ExperimentResult> run_sweep(const ExperimentConfig& base,
                                        const SweepSpec& sweep,
                                        std::uint32_t jobs = 1);

// CSV schema: config_digest,axis_value,metric,estimate,se,R,wall_clock_ms
void append_result_csv(const std::string& path, const ExperimentResult& result,
                       double axis_value);

}  // namespace vscreen
