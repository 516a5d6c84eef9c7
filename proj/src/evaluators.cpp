#include "vscreen/evaluators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace vscreen {

namespace {

double base_draw(Distribution dist, double p1, double p2, Rng& rng) {
  switch (dist) {
    case Distribution::normal:
      return p2 == 0.0 ? p1 : p1 + p2 * rng.next_normal();
    case Distribution::lognormal:
      return std::exp(p1 + p2 * rng.next_normal());
    case Distribution::pareto:
      // Pareto(shape x, scale a): a * U^{-1/x}
      return p2 * std::pow(rng.next_uniform(), -1.0 / p1);
  }
  throw std::logic_error("unknown distribution");
}

}  // namespace

SyntheticConfig synthetic_row(const std::string& name, std::uint32_t k,
                              std::uint32_t m, double gap,
                              std::uint64_t seed) {
  SyntheticConfig c;
  c.k = k;
  c.m = m;
  c.gamma_or_delta = gap;
  c.seed = seed;
  if (name == "sc-normal") {
    c.family = ConfigFamily::SC; c.distribution = Distribution::normal;
    c.param1 = 0.1; c.param2 = 0.6;
  } else if (name == "sc-lognormal") {
    c.family = ConfigFamily::SC; c.distribution = Distribution::lognormal;
    c.param1 = -3.7; c.param2 = 1.8;
  } else if (name == "sc-pareto") {
    c.family = ConfigFamily::SC; c.distribution = Distribution::pareto;
    c.param1 = 3.1; c.param2 = 0.8;
  } else if (name == "rm-normal") {
    c.family = ConfigFamily::RM; c.distribution = Distribution::normal;
    c.param1 = 0.0; c.param2 = 1.0;
  } else if (name == "rm-lognormal") {
    c.family = ConfigFamily::RM; c.distribution = Distribution::lognormal;
    c.param1 = -2.2; c.param2 = 1.5;
  } else if (name == "rm-pareto") {
    c.family = ConfigFamily::RM; c.distribution = Distribution::pareto;
    c.param1 = 2.6; c.param2 = 0.8;
  } else {
    throw std::invalid_argument("unknown synthetic configuration: " + name);
  }
  return c;
}

SyntheticEvaluator::SyntheticEvaluator(const SyntheticConfig& config)
    : config_(config) {
  const std::uint32_t k = config.k;
  const std::uint32_t m = config.m;
  if (k == 0 || m == 0 || m >= k)
    throw std::invalid_argument("synthetic config requires 1 <= m < k");
  if (config.distribution == Distribution::pareto &&
      (config.param1 <= 0.0 || config.param2 <= 0.0))
    throw std::invalid_argument("pareto parameters must be positive");
  if (config.distribution == Distribution::lognormal && config.param2 < 0.0)
    throw std::invalid_argument("lognormal sigma must be nonnegative");

  offsets_.resize(k);
  const double gap = config.gamma_or_delta;
  if (config_.family == ConfigFamily::SC) {
    for (std::uint32_t i = 0; i < k; ++i)
      offsets_[i] = (i < m) ? 0.0 : -gap;
  } else {
    const std::uint32_t g = std::min(config.g, k);
    if (g < m) throw std::invalid_argument("RM config requires g >= m");
    Rng rng(mix64(config.seed ^ 0x524du));
    offsets_[0] = 0.0;
    for (std::uint32_t i = 1; i < k; ++i) {
      if (i < m)
        offsets_[i] = gap + 2.0 * gap * rng.next_uniform();
      else if (i < g)
        offsets_[i] = gap * rng.next_uniform();
      else
        offsets_[i] = -rng.next_uniform();
    }
    // Alternatives are indexed in descending mean order.
    std::sort(offsets_.begin(), offsets_.end(), std::greater<double>());
  }

  switch (config.distribution) {
    case Distribution::normal:
      base_mean_ = config.param1;
      break;
    case Distribution::lognormal:
      base_mean_ = std::exp(config.param1 + 0.5 * config.param2 * config.param2);
      break;
    case Distribution::pareto:
      if (config.param1 > 1.0) {
        base_mean_ = config.param1 * config.param2 / (config.param1 - 1.0);
      } else {
        offsets_only_ = true;  // infinite mean; bookkeeping uses offsets
        base_mean_ = 0.0;
      }
      break;
  }
  means_.resize(k);
  for (std::uint32_t i = 0; i < k; ++i) means_[i] = base_mean_ + offsets_[i];
}

double SyntheticEvaluator::sample(std::uint32_t alt, std::uint64_t draw_index,
                                  std::uint64_t run_seed) const {
  Rng rng = draw_rng(run_seed, alt, draw_index);
  return base_draw(config_.distribution, config_.param1, config_.param2, rng) +
         offsets_[alt];
}

std::string SyntheticEvaluator::description() const {
  std::ostringstream out;
  out << (config_.family == ConfigFamily::SC ? "SC" : "RM") << "-";
  switch (config_.distribution) {
    case Distribution::normal: out << "Normal"; break;
    case Distribution::lognormal: out << "LogNormal"; break;
    case Distribution::pareto: out << "Pareto"; break;
  }
  out << " k=" << config_.k << " m=" << config_.m;
  return out.str();
}

std::unique_ptr<SyntheticEvaluator> build_synthetic(const SyntheticConfig& c) {
  return std::make_unique<SyntheticEvaluator>(c);
}

// ---------------------------------------------------------------------------

std::vector<std::array<std::uint32_t, 7>> enumerate_allocations(
    std::uint32_t L, bool equality_mode) {
  if (L < 7) throw std::invalid_argument("no feasible allocation: L < 7");
  std::vector<std::array<std::uint32_t, 7>> result;
  std::array<std::uint32_t, 7> x{};
  std::function<void(std::uint32_t, std::uint32_t)> rec =
      [&](std::uint32_t pos, std::uint32_t used) {
        if (pos == 7) {
          if (!equality_mode || used == L) result.push_back(x);
          return;
        }
        const std::uint32_t remaining_min = 7 - pos - 1;
        for (std::uint32_t v = 1; used + v + remaining_min <= L; ++v) {
          x[pos] = v;
          rec(pos + 1, used + v);
        }
      };
  rec(0, 0);
  return result;
}

RedundancyProblem default_redundancy_problem(std::uint32_t L,
                                             bool equality_mode) {
  RedundancyProblem p;
  p.mu = {0.1, 0.2, 0.3, 0.2, 0.1, 0.2, 0.3};
  p.sigma = {1.5, 1.5, 1.5, 1.5, 1.5, 1.5, 1.5};
  // Shipped default structure: two source subsystems (0, 3), three relays
  // (1, 4, 5), two sinks (2, 6); 6 source->sink paths over 7 nodes.
  p.paths = {{0, 1, 2}, {0, 1, 6}, {0, 5, 6}, {3, 4, 2}, {3, 4, 6}, {3, 5, 6}};
  p.L = L;
  p.equality_mode = equality_mode;
  p.allocations = enumerate_allocations(L, equality_mode);
  return p;
}

double sample_redundancy(const RedundancyProblem& problem,
                         std::uint32_t alloc_index, Rng& rng) {
  if (alloc_index >= problem.allocations.size())
    throw std::invalid_argument("allocation index out of range");
  if (problem.paths.empty())
    throw std::invalid_argument("redundancy problem has no paths");
  const auto& x = problem.allocations[alloc_index];
  double lifetimes[7];
  for (std::uint32_t i = 0; i < 7; ++i) {
    double sum = 0.0;
    for (std::uint32_t c = 0; c < x[i]; ++c) {
      const double s = problem.sigma[i];
      sum += s == 0.0 ? std::exp(problem.mu[i])
                      : std::exp(problem.mu[i] + s * rng.next_normal());
    }
    lifetimes[i] = sum;
  }
  double best = -1.0;
  for (const auto& path : problem.paths) {
    if (path.empty()) throw std::invalid_argument("empty path in problem");
    double weakest = lifetimes[path[0]];
    for (std::uint32_t node : path)
      weakest = std::min(weakest, lifetimes[node]);
    best = std::max(best, weakest);
  }
  return best;
}

RedundancyEvaluator::RedundancyEvaluator(RedundancyProblem problem)
    : problem_(std::move(problem)) {}

double RedundancyEvaluator::sample(std::uint32_t alt, std::uint64_t draw_index,
                                   std::uint64_t run_seed) const {
  Rng rng = draw_rng(run_seed, alt, draw_index);
  return sample_redundancy(problem_, alt, rng);
}

std::string RedundancyEvaluator::description() const {
  std::ostringstream out;
  out << "redundancy allocation L=" << problem_.L
      << " k=" << problem_.allocations.size();
  return out.str();
}

// ---------------------------------------------------------------------------

EmpiricalDataset load_empirical(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  EmpiricalDataset dataset;
  dataset.source_file = path;
  std::vector<std::pair<std::uint32_t, std::vector<double>>> records;
  std::string line;
  std::size_t line_no = 0;
  std::uint32_t max_id = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::runtime_error("dataset parse error at line " +
                               std::to_string(line_no) + ": " + e.what());
    }
    if (!rec.contains("id") || !rec.contains("obs"))
      throw std::runtime_error("dataset record at line " +
                               std::to_string(line_no) +
                               " missing id or obs");
    const std::uint32_t id = rec.at("id").get<std::uint32_t>();
    std::vector<double> obs = rec.at("obs").get<std::vector<double>>();
    if (obs.empty())
      throw std::runtime_error("alternative " + std::to_string(id) +
                               " has no observations (line " +
                               std::to_string(line_no) + ")");
    max_id = std::max(max_id, id);
    records.emplace_back(id, std::move(obs));
  }
  if (records.empty()) throw std::runtime_error("dataset file is empty");
  dataset.observations.resize(max_id + 1);
  for (auto& [id, obs] : records) {
    if (!dataset.observations[id].empty())
      throw std::runtime_error("duplicate record for alternative " +
                               std::to_string(id));
    dataset.observations[id] = std::move(obs);
  }
  for (std::uint32_t i = 0; i < dataset.observations.size(); ++i)
    if (dataset.observations[i].empty())
      throw std::runtime_error("missing record for alternative " +
                               std::to_string(i));
  return dataset;
}

void save_empirical(const EmpiricalDataset& dataset, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write dataset file: " + path);
    for (std::uint32_t i = 0; i < dataset.observations.size(); ++i) {
      nlohmann::json rec;
      rec["id"] = i;
      rec["obs"] = dataset.observations[i];
      out << rec.dump() << "\n";
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot replace dataset file: " + path);
}

EmpiricalEvaluator::EmpiricalEvaluator(EmpiricalDataset dataset)
    : dataset_(std::move(dataset)) {
  for (const auto& obs : dataset_.observations)
    if (obs.empty())
      throw std::invalid_argument("empirical dataset has an empty alternative");
}

double EmpiricalEvaluator::sample(std::uint32_t alt, std::uint64_t draw_index,
                                  std::uint64_t run_seed) const {
  const auto& obs = dataset_.observations[alt];
  Rng rng = draw_rng(run_seed, alt, draw_index);
  const auto idx = std::min<std::size_t>(
      obs.size() - 1,
      static_cast<std::size_t>(rng.next_uniform() * obs.size()));
  return obs[idx];
}

std::vector<double> EmpiricalEvaluator::sample_means() const {
  std::vector<double> means;
  means.reserve(dataset_.observations.size());
  for (const auto& obs : dataset_.observations) {
    double sum = 0.0;
    for (double v : obs) sum += v;
    means.push_back(sum / static_cast<double>(obs.size()));
  }
  return means;
}

RecordedStream::RecordedStream(std::vector<std::vector<double>> streams)
    : streams_(std::move(streams)) {
  if (streams_.empty())
    throw std::invalid_argument("recorded stream requires >= 1 alternative");
}

double RecordedStream::sample(std::uint32_t alt, std::uint64_t draw_index,
                              std::uint64_t /*run_seed*/) const {
  const auto& s = streams_[alt];
  if (draw_index >= s.size())
    throw std::out_of_range("recorded stream exhausted for alternative " +
                            std::to_string(alt));
  return s[draw_index];
}

MeanEstimate estimate_true_means(const Evaluator& evaluator,
                                 std::uint64_t reps_per_alt,
                                 std::uint64_t seed) {
  if (reps_per_alt < 1) throw std::invalid_argument("reps_per_alt must be >= 1");
  MeanEstimate est;
  est.reps_per_alt = reps_per_alt;
  const std::uint32_t k = evaluator.k();
  est.means.resize(k);
  est.standard_errors.resize(k);
  for (std::uint32_t i = 0; i < k; ++i) {
    double mean = 0.0, m2 = 0.0;
    for (std::uint64_t r = 0; r < reps_per_alt; ++r) {
      const double v = evaluator.sample(i, r, seed);
      const double d = v - mean;
      mean += d / static_cast<double>(r + 1);
      m2 += d * (v - mean);
    }
    est.means[i] = mean;
    est.standard_errors[i] =
        reps_per_alt > 1
            ? std::sqrt(m2 / static_cast<double>(reps_per_alt - 1) /
                        static_cast<double>(reps_per_alt))
            : 0.0;
  }
  return est;
}

}  // namespace vscreen
