#include "vscreen/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "vscreen/parallel.hpp"
#include "vscreen/rng.hpp"

namespace vscreen {

std::uint64_t BudgetSpec::resolve_total(std::uint32_t k) const {
  if (c > 0.0)
    return static_cast<std::uint64_t>(std::llround(c * static_cast<double>(k)));
  if (total == 0) throw std::invalid_argument("budget is zero");
  return total;
}

namespace {

nlohmann::json spec_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["problem"] = {{"kind", c.problem.kind},
                  {"row", c.problem.row},
                  {"k", c.problem.k},
                  {"gap", c.problem.gap},
                  {"g", c.problem.g},
                  {"instance_seed", c.problem.instance_seed},
                  {"L", c.problem.L},
                  {"equality_mode", c.problem.equality_mode},
                  {"mean_reps", c.problem.mean_reps},
                  {"cache_dir", c.problem.cache_dir},
                  {"dataset_path", c.problem.dataset_path}};
  j["algorithm"] = {{"id", c.algorithm.id},
                    {"m", c.algorithm.m},
                    {"M_ratio", c.algorithm.M_ratio},
                    {"workers", c.algorithm.workers},
                    {"latency_max_ms", c.algorithm.latency_max_ms},
                    {"ocbam_n1_fraction", c.algorithm.comparator.ocbam_n1_fraction},
                    {"ocbam_batch", c.algorithm.comparator.ocbam_batch}};
  if (c.algorithm.group_count)
    j["algorithm"]["group_count"] = *c.algorithm.group_count;
  j["budget"] = {{"c", c.budget.c},
                 {"total", c.budget.total},
                 {"seeding_fraction", c.budget.seeding_fraction},
                 {"greedy_fraction", c.budget.greedy_fraction}};
  j["replications"] = c.replications;
  j["seed"] = c.seed;
  j["out_path"] = c.out_path;
  return j;
}

}  // namespace

std::string ExperimentConfig::to_json() const {
  return spec_to_json(*this).dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ExperimentConfig c;
  if (j.contains("problem")) {
    const auto& p = j.at("problem");
    c.problem.kind = p.value("kind", c.problem.kind);
    c.problem.row = p.value("row", c.problem.row);
    c.problem.k = p.value("k", c.problem.k);
    c.problem.gap = p.value("gap", c.problem.gap);
    c.problem.g = p.value("g", c.problem.g);
    c.problem.instance_seed = p.value("instance_seed", c.problem.instance_seed);
    c.problem.L = p.value("L", c.problem.L);
    c.problem.equality_mode = p.value("equality_mode", c.problem.equality_mode);
    c.problem.mean_reps = p.value("mean_reps", c.problem.mean_reps);
    c.problem.cache_dir = p.value("cache_dir", c.problem.cache_dir);
    c.problem.dataset_path = p.value("dataset_path", c.problem.dataset_path);
  }
  if (j.contains("algorithm")) {
    const auto& a = j.at("algorithm");
    c.algorithm.id = a.value("id", c.algorithm.id);
    c.algorithm.m = a.value("m", c.algorithm.m);
    c.algorithm.M_ratio = a.value("M_ratio", c.algorithm.M_ratio);
    if (a.contains("group_count"))
      c.algorithm.group_count = a.at("group_count").get<std::uint32_t>();
    c.algorithm.workers = a.value("workers", c.algorithm.workers);
    c.algorithm.latency_max_ms =
        a.value("latency_max_ms", c.algorithm.latency_max_ms);
    c.algorithm.comparator.ocbam_n1_fraction =
        a.value("ocbam_n1_fraction", c.algorithm.comparator.ocbam_n1_fraction);
    c.algorithm.comparator.ocbam_batch =
        a.value("ocbam_batch", c.algorithm.comparator.ocbam_batch);
  }
  if (j.contains("budget")) {
    const auto& b = j.at("budget");
    c.budget.c = b.value("c", c.budget.c);
    c.budget.total = b.value("total", c.budget.total);
    c.budget.seeding_fraction =
        b.value("seeding_fraction", c.budget.seeding_fraction);
    c.budget.greedy_fraction =
        b.value("greedy_fraction", c.budget.greedy_fraction);
  }
  c.replications = j.value("replications", c.replications);
  c.seed = j.value("seed", c.seed);
  c.out_path = j.value("out_path", c.out_path);
  return c;
}

std::string config_digest(const ExperimentConfig& config) {
  const std::string text = spec_to_json(config).dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

std::vector<double> redundancy_true_means(const RedundancyProblem& problem,
                                          std::uint64_t reps,
                                          std::uint64_t seed,
                                          const std::string& cache_dir) {
  std::ostringstream key;
  key << problem.L << ':' << problem.equality_mode << ':' << reps << ':'
      << seed;
  for (double v : problem.mu) key << ':' << v;
  for (double v : problem.sigma) key << ':' << v;
  for (const auto& path : problem.paths) {
    key << ":p";
    for (std::uint32_t n : path) key << '.' << n;
  }
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : key.str()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream name;
  name << "redundancy-means-" << std::hex << h << ".json";
  const std::filesystem::path cache_path =
      std::filesystem::path(cache_dir) / name.str();

  if (std::filesystem::exists(cache_path)) {
    std::ifstream in(cache_path);
    nlohmann::json j;
    in >> j;
    std::vector<double> means = j.at("means").get<std::vector<double>>();
    if (means.size() == problem.allocations.size()) return means;
  }

  RedundancyEvaluator evaluator(problem);
  const MeanEstimate est = estimate_true_means(evaluator, reps, seed);
  std::filesystem::create_directories(cache_path.parent_path());
  nlohmann::json j;
  j["means"] = est.means;
  j["reps"] = reps;
  j["seed"] = seed;
  const std::filesystem::path tmp = cache_path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    out << j.dump();
  }
  std::filesystem::rename(tmp, cache_path);
  return est.means;
}

ProblemBundle build_problem(const ProblemSpec& spec, std::uint32_t m) {
  ProblemBundle bundle;
  if (spec.kind == "synthetic") {
    SyntheticConfig config =
        synthetic_row(spec.row, spec.k, m, spec.gap, spec.instance_seed);
    config.g = spec.g;
    auto ev = build_synthetic(config);
    bundle.true_means = ev->true_means();
    bundle.means_are_offsets_only = ev->means_are_offsets_only();
    bundle.evaluator = std::move(ev);
    bundle.delta = spec.gap;
    bundle.k = spec.k;
    return bundle;
  }
  if (spec.kind == "redundancy") {
    RedundancyProblem problem =
        default_redundancy_problem(spec.L, spec.equality_mode);
    bundle.true_means = redundancy_true_means(
        problem, spec.mean_reps, spec.instance_seed, spec.cache_dir);
    bundle.evaluator = std::make_shared<RedundancyEvaluator>(problem);
    bundle.delta = spec.gap;
    bundle.k = bundle.evaluator->k();
    return bundle;
  }
  if (spec.kind == "empirical") {
    auto ev = std::make_shared<EmpiricalEvaluator>(
        load_empirical(spec.dataset_path));
    bundle.true_means = ev->sample_means();
    bundle.evaluator = std::move(ev);
    bundle.delta = spec.gap;
    bundle.k = bundle.evaluator->k();
    return bundle;
  }
  throw std::invalid_argument("unknown problem kind: " + spec.kind);
}

ReplicationScore score_replication(const SelectionResult& result,
                                   const std::vector<double>& true_means,
                                   std::uint32_t m, double delta) {
  ReplicationScore score;
  std::vector<std::uint32_t> best = top_m_indices(true_means, m);
  std::sort(best.begin(), best.end());
  std::vector<std::uint32_t> chosen = result.selected;
  std::sort(chosen.begin(), chosen.end());
  score.correct = chosen == best;
  score.good_screen =
      is_good_screening(result, good_set(true_means, m, delta));
  score.good_rank =
      score.good_screen && is_good_ranking(result, true_means, delta);
  return score;
}

namespace {

struct RepOutcome {
  ReplicationScore score;
  double utilization = 0.0;
};

RepOutcome run_one(const ExperimentConfig& config,
                   const ProblemBundle& bundle, std::uint64_t rep) {
  const std::uint64_t run_seed =
      derive_seed(hash_combine(config.seed, 0xEBull), rep);
  const std::uint32_t k = bundle.k;
  const std::uint32_t m = config.algorithm.m;
  const std::uint64_t B = config.budget.resolve_total(k);
  EfgParams params;
  params.m = m;
  params.group_count = config.algorithm.group_count;
  const auto big_M = static_cast<std::uint32_t>(
      std::llround(config.algorithm.M_ratio * m));

  RepOutcome outcome;
  SelectionResult result;
  const std::string& id = config.algorithm.id;
  if (id == "efg-m") {
    BudgetPlan plan = split_budget(B, k, 0.0, config.budget.greedy_fraction);
    result = run_efg_m(*bundle.evaluator, plan, params, run_seed);
  } else if (id == "efg-big-m") {
    params.M = big_M;
    BudgetPlan plan = split_budget(B, k, 0.0, config.budget.greedy_fraction);
    result = run_efg_M(*bundle.evaluator, plan, params, run_seed);
  } else if (id == "efg-big-m-plus") {
    params.M = big_M;
    BudgetPlan plan = split_budget(B, k, config.budget.seeding_fraction,
                                   config.budget.greedy_fraction);
    result = run_efg_M_plus(*bundle.evaluator, plan, params, run_seed);
  } else if (id == "efg-async") {
    params.M = big_M;
    BudgetPlan plan = split_budget(B, k, config.budget.seeding_fraction,
                                   config.budget.greedy_fraction);
    AsyncOptions options;
    options.workers = config.algorithm.workers;
    options.latency_max_ms = config.algorithm.latency_max_ms;
    AsyncReport report = run_efg_M_plus_async(*bundle.evaluator, plan, params,
                                              run_seed, options);
    outcome.utilization = report.utilization;
    result = std::move(report.selection);
  } else if (id == "sar") {
    result = run_sar(*bundle.evaluator, m, B, run_seed);
  } else if (id == "sar-big-m") {
    params.M = big_M;
    BudgetPlan plan = split_budget(B, k, 0.0, config.budget.greedy_fraction);
    result = run_sar_M(*bundle.evaluator, plan, params, run_seed);
  } else if (id == "ocbam") {
    result = run_ocbam(*bundle.evaluator, m, B, config.algorithm.comparator,
                       run_seed);
  } else {
    throw std::invalid_argument("unknown algorithm id: " + id);
  }
  outcome.score =
      score_replication(result, bundle.true_means, m, bundle.delta);
  return outcome;
}

MetricEstimate make_metric(const std::string& name, std::uint64_t successes,
                           std::uint64_t R) {
  MetricEstimate est;
  est.metric = name;
  est.successes = successes;
  est.replications = R;
  const double p = static_cast<double>(successes) / static_cast<double>(R);
  est.estimate = p;
  est.standard_error = std::sqrt(p * (1.0 - p) / static_cast<double>(R));
  return est;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config,
                                std::uint32_t jobs) {
  if (config.replications == 0)
    throw std::invalid_argument("replications must be positive");
  const auto start = std::chrono::steady_clock::now();
  const ProblemBundle bundle =
      build_problem(config.problem, config.algorithm.m);

  const std::uint64_t R = config.replications;
  std::uint64_t correct = 0, good = 0, ranked = 0;
  double utilization_sum = 0.0;

  if (jobs <= 1) {
    for (std::uint64_t rep = 0; rep < R; ++rep) {
      const RepOutcome o = run_one(config, bundle, rep);
      correct += o.score.correct;
      good += o.score.good_screen;
      ranked += o.score.good_rank;
      utilization_sum += o.utilization;
    }
  } else {
    struct Local {
      std::uint64_t correct = 0, good = 0, ranked = 0;
      double utilization = 0.0;
    };
    std::vector<Local> locals(jobs);
    std::vector<std::thread> threads;
    for (std::uint32_t w = 0; w < jobs; ++w) {
      threads.emplace_back([&, w]() {
        for (std::uint64_t rep = w; rep < R; rep += jobs) {
          const RepOutcome o = run_one(config, bundle, rep);
          locals[w].correct += o.score.correct;
          locals[w].good += o.score.good_screen;
          locals[w].ranked += o.score.good_rank;
          locals[w].utilization += o.utilization;
        }
      });
    }
    for (auto& t : threads) t.join();
    for (const Local& l : locals) {
      correct += l.correct;
      good += l.good;
      ranked += l.ranked;
      utilization_sum += l.utilization;
    }
  }

  ExperimentResult result;
  result.digest = config_digest(config);
  result.metrics.push_back(make_metric("PCS", correct, R));
  result.metrics.push_back(make_metric("PGS", good, R));
  result.metrics.push_back(make_metric("PGSR", ranked, R));
  result.mean_utilization = utilization_sum / static_cast<double>(R);
  result.wall_clock_ms =
      std::chrono::duration<double, std::milli>(
          std::chrono::steady_clock::now() - start)
          .count();
  if (!config.out_path.empty())
    append_result_csv(config.out_path, result, 0.0);
  return result;
}

void append_result_csv(const std::string& path, const ExperimentResult& result,
                       double axis_value) {
  const bool fresh = !std::filesystem::exists(path);
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot open results file: " + path);
  if (fresh)
    out << "config_digest,axis_value,metric,estimate,se,R,wall_clock_ms\n";
  for (const MetricEstimate& m : result.metrics) {
    out << result.digest << ',' << axis_value << ',' << m.metric << ','
        << m.estimate << ',' << m.standard_error << ',' << m.replications
        << ',' << result.wall_clock_ms << '\n';
  }
}

std::vector<ExperimentResult> run_sweep(const ExperimentConfig& base,
                                        const SweepSpec& sweep,
                                        std::uint32_t jobs) {
  std::vector<ExperimentResult> results;
  for (double value : sweep.values) {
    ExperimentConfig config = base;
    config.out_path.clear();  // rows written here with the axis value
    if (sweep.axis == "k") {
      config.problem.k = static_cast<std::uint32_t>(value);
    } else if (sweep.axis == "c") {
      config.budget.c = value;
      config.budget.total = 0;
    } else if (sweep.axis == "B") {
      config.budget.total = static_cast<std::uint64_t>(value);
      config.budget.c = 0.0;
    } else if (sweep.axis == "gap") {
      config.problem.gap = value;
    } else if (sweep.axis == "m") {
      config.algorithm.m = static_cast<std::uint32_t>(value);
    } else if (sweep.axis == "M_ratio") {
      config.algorithm.M_ratio = value;
    } else if (sweep.axis == "workers") {
      config.algorithm.workers = static_cast<std::uint32_t>(value);
    } else if (sweep.axis == "L") {
      config.problem.L = static_cast<std::uint32_t>(value);
    } else {
      throw std::invalid_argument("unknown sweep axis: " + sweep.axis);
    }
    ExperimentResult result = run_experiment(config, jobs);
    if (!base.out_path.empty())
      append_result_csv(base.out_path, result, value);
    results.push_back(std::move(result));
  }
  return results;
}

}  // namespace vscreen
