// Pluggable stochastic evaluators: synthetic SC/RM configurations,
// empirical resampling, the redundancy-allocation network simulator, and
// replayable recorded streams.
//
// Evaluators are immutable after construction and safe to call from many
// threads concurrently; every observation is a pure function of
// (run_seed, alternative, draw_index).
#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "vscreen/rng.hpp"

namespace vscreen {

class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual double sample(std::uint32_t alt, std::uint64_t draw_index,
                        std::uint64_t run_seed) const = 0;
  virtual std::uint32_t k() const = 0;
  virtual std::string description() const { return "evaluator"; }
};

enum class ConfigFamily { SC, RM };
enum class Distribution { normal, lognormal, pareto };

struct SyntheticConfig {
  ConfigFamily family = ConfigFamily::SC;
  Distribution distribution = Distribution::normal;
  double param1 = 0.0;         // normal/lognormal mu, pareto shape x
  double param2 = 1.0;         // normal/lognormal sigma, pareto scale a
  double gamma_or_delta = 0.1; // gamma for SC, delta for RM
  std::uint32_t m = 10;
  std::uint32_t g = 15;        // RM only
  std::uint32_t k = 0;
  std::uint64_t seed = 0;      // drives the RM offset draws
};

// Named parameter rows: sc-normal, sc-lognormal, sc-pareto, rm-normal,
// rm-lognormal, rm-pareto.
SyntheticConfig synthetic_row(const std::string& name, std::uint32_t k,
                              std::uint32_t m, double gap, std::uint64_t seed);

class SyntheticEvaluator : public Evaluator {
 public:
  explicit SyntheticEvaluator(const SyntheticConfig& config);

  double sample(std::uint32_t alt, std::uint64_t draw_index,
                std::uint64_t run_seed) const override;
  std::uint32_t k() const override { return config_.k; }
  std::string description() const override;

  // Mean vector, nonincreasing.  When the base distribution has no finite
  // mean (Pareto with shape <= 1) the entries are the mean *offsets* only;
  // offsets still define the optimal subset and the good set exactly.
  const std::vector<double>& true_means() const { return means_; }
  bool means_are_offsets_only() const { return offsets_only_; }

 private:
  SyntheticConfig config_;
  std::vector<double> offsets_;  // additive shift per alternative
  std::vector<double> means_;
  double base_mean_ = 0.0;
  bool offsets_only_ = false;
};

std::unique_ptr<SyntheticEvaluator> build_synthetic(const SyntheticConfig& c);

// ---------------------------------------------------------------------------
// Redundancy allocation network simulator

struct RedundancyProblem {
  std::array<double, 7> mu{};     // lognormal shape (underlying normal mean)
  std::array<double, 7> sigma{};  // lognormal scale (underlying normal sd)
  std::vector<std::vector<std::uint32_t>> paths;  // subsystem index sets
  std::uint32_t L = 13;
  bool equality_mode = false;  // sum(x)==L instead of 7<=sum(x)<=L
  std::vector<std::array<std::uint32_t, 7>> allocations;
};

// The reported alternative counts match {x in N_+^7 : sum <= L}; an
// equality-mode flag restricts to sum == L.
std::vector<std::array<std::uint32_t, 7>> enumerate_allocations(
    std::uint32_t L, bool equality_mode = false);

// Problem with the default parameters (mu = .1/.2/.3 pattern, sigma = 1.5)
// and the shipped 7-node 6-path network structure.  The path incidence is a
// configuration input; acceptance results on this simulator depend on it.
RedundancyProblem default_redundancy_problem(std::uint32_t L,
                                             bool equality_mode = false);

class RedundancyEvaluator : public Evaluator {
 public:
  explicit RedundancyEvaluator(RedundancyProblem problem);

  double sample(std::uint32_t alt, std::uint64_t draw_index,
                std::uint64_t run_seed) const override;
  std::uint32_t k() const override {
    return static_cast<std::uint32_t>(problem_.allocations.size());
  }
  std::string description() const override;
  const RedundancyProblem& problem() const { return problem_; }

 private:
  RedundancyProblem problem_;
};

// One system-lifetime draw for an allocation: per subsystem sum x_i
// lognormal component lifetimes, per path take the weakest subsystem,
// system value is the strongest path.
double sample_redundancy(const RedundancyProblem& problem,
                         std::uint32_t alloc_index, Rng& rng);

// ---------------------------------------------------------------------------
// Empirical resampling and recorded streams

struct EmpiricalDataset {
  std::vector<std::vector<double>> observations;  // per alternative
  std::string source_file;
  std::string collection_date;
  std::string prompt_digest;
};

// JSONL, one record per alternative: {"id": int, "obs": [floats]}.
// Parse failures name the offending line.
EmpiricalDataset load_empirical(const std::string& path);
void save_empirical(const EmpiricalDataset& dataset, const std::string& path);

class EmpiricalEvaluator : public Evaluator {
 public:
  explicit EmpiricalEvaluator(EmpiricalDataset dataset);
  double sample(std::uint32_t alt, std::uint64_t draw_index,
                std::uint64_t run_seed) const override;
  std::uint32_t k() const override {
    return static_cast<std::uint32_t>(dataset_.observations.size());
  }
  std::string description() const override { return "empirical resampler"; }
  std::vector<double> sample_means() const;

 private:
  EmpiricalDataset dataset_;
};

// Fixed per-alternative sequences consumed by draw index; the n-th draw is
// always the n-th stored value.  Draws past the horizon throw.
class RecordedStream : public Evaluator {
 public:
  explicit RecordedStream(std::vector<std::vector<double>> streams);
  double sample(std::uint32_t alt, std::uint64_t draw_index,
                std::uint64_t run_seed) const override;
  std::uint32_t k() const override {
    return static_cast<std::uint32_t>(streams_.size());
  }
  std::string description() const override { return "recorded stream"; }
  const std::vector<double>& stream(std::uint32_t alt) const {
    return streams_[alt];
  }
  std::uint64_t horizon(std::uint32_t alt) const {
    return streams_[alt].size();
  }

 private:
  std::vector<std::vector<double>> streams_;
};

struct MeanEstimate {
  std::vector<double> means;
  std::vector<double> standard_errors;
  std::uint64_t reps_per_alt = 0;
};

// Per-alternative sample average over fresh draws; used to define the good
// set for simulator-backed problems.
MeanEstimate estimate_true_means(const Evaluator& evaluator,
                                 std::uint64_t reps_per_alt,
                                 std::uint64_t seed);

}  // namespace vscreen
