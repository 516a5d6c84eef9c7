// Command-line surface: experiment runs and sweeps, true-mean estimation,
// allocation enumeration, LLM dataset collection, and the stream oracle.
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "vscreen/harness.hpp"
#include "vscreen/llm.hpp"
#include "vscreen/oracle.hpp"

namespace {

vscreen::ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return vscreen::ExperimentConfig::from_json(buf.str());
}

void print_result(const vscreen::ExperimentResult& result) {
  std::cout << "digest " << result.digest << "\n";
  for (const auto& m : result.metrics)
    std::cout << m.metric << " " << m.estimate << " se " << m.standard_error
              << " R " << m.replications << "\n";
  if (result.mean_utilization > 0.0)
    std::cout << "utilization " << result.mean_utilization << "\n";
  std::cout << "wall_clock_ms " << result.wall_clock_ms << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"top-m subset screening under a sampling budget"};
  app.require_subcommand(1);

  // run
  std::string config_path, out_path;
  std::uint64_t reps = 0, seed_override = 0;
  bool has_seed = false;
  std::uint32_t jobs = 1;
  bool print_template = false;
  auto* run = app.add_subcommand("run", "run a configured experiment");
  run->add_option("--config", config_path, "experiment config JSON file");
  run->add_option("--reps", reps, "override replication count");
  run->add_flag("--print-config", print_template,
                "print a default config and exit");
  auto* seed_opt = run->add_option("--seed", seed_override, "override seed");
  run->add_option("--out", out_path, "override CSV output path");
  run->add_option("--jobs", jobs, "replication worker threads");

  // sweep
  std::string sweep_axis;
  std::vector<double> sweep_values;
  auto* sweep = app.add_subcommand("sweep", "run an experiment per axis value");
  sweep->add_option("--config", config_path, "experiment config JSON file")
      ->required();
  sweep->add_option("--axis", sweep_axis,
                    "k | c | B | gap | m | M_ratio | workers | L")
      ->required();
  sweep->add_option("--values", sweep_values, "axis values")->required();
  sweep->add_option("--out", out_path, "override CSV output path");
  sweep->add_option("--jobs", jobs, "replication worker threads");

  // estimate-means
  std::string kind = "redundancy", row = "sc-normal";
  std::uint32_t k_alt = 0, L = 13, m_sub = 10;
  double gap = 0.1;
  std::uint64_t mean_reps = 30000, mean_seed = 0;
  bool equality = false;
  auto* est = app.add_subcommand("estimate-means",
                                 "Monte Carlo true means of a problem");
  est->add_option("--kind", kind, "synthetic | redundancy | empirical");
  est->add_option("--row", row, "synthetic configuration name");
  est->add_option("--k", k_alt, "alternatives (synthetic)");
  est->add_option("--m", m_sub, "subset size");
  est->add_option("--gap", gap, "gamma / delta");
  est->add_option("--L", L, "redundancy component budget");
  est->add_flag("--equality", equality, "require sum(x) == L");
  est->add_option("--reps", mean_reps, "draws per alternative");
  est->add_option("--seed", mean_seed, "estimation seed");
  est->add_option("--out", out_path, "write means JSON here");

  // enumerate-allocs
  auto* alloc = app.add_subcommand("enumerate-allocs",
                                   "feasible redundancy allocations");
  alloc->add_option("--L", L, "component budget")->required();
  alloc->add_flag("--equality", equality, "require sum(x) == L");
  alloc->add_option("--out", out_path, "write allocations JSONL here");

  // collect
  std::string base_url, model, dialect = "chat", api_key_env = "VSCREEN_API_KEY";
  std::uint32_t catalog_k = 36;
  std::uint64_t per_alt = 1;
  double discard_above = 6000.0;
  auto* collect = app.add_subcommand("collect",
                                     "collect a willingness-to-pay dataset");
  collect->add_option("--endpoint", base_url, "model server base URL")
      ->required();
  collect->add_option("--model", model, "model name")->required();
  collect->add_option("--dialect", dialect, "chat | generate");
  collect->add_option("--api-key-env", api_key_env,
                      "environment variable holding the API key");
  collect->add_option("--catalog", catalog_k, "catalog size (36/360/1080/3240)");
  collect->add_option("--per-alt", per_alt, "observations per alternative");
  collect->add_option("--discard-above", discard_above,
                      "redraw answers above this price");
  collect->add_option("--out", out_path, "dataset path")->required();

  // oracle
  auto* oracle = app.add_subcommand("oracle", "recorded-stream analysis");
  oracle->require_subcommand(1);
  std::string stream_path;
  std::uint32_t n0 = 1;
  double mu = 0.0;
  std::vector<double> boundaries, radii;
  auto* analyze = oracle->add_subcommand("analyze",
                                         "running-average crossing analysis");
  analyze->add_option("--input", stream_path, "JSONL streams file")->required();
  analyze->add_option("--n0", n0, "first index considered");
  analyze->add_option("--mu", mu, "center for last-exit times");
  analyze->add_option("--boundary", boundaries, "crossing boundaries");
  analyze->add_option("--radius", radii, "last-exit radii");

  double z = 0.0;
  std::uint64_t c_reps = 10000, horizon = 1000000, c_seed = 0;
  auto* estc = oracle->add_subcommand(
      "estimate-c", "expected crossing time of a normal running average");
  estc->add_option("--z", z, "boundary")->required();
  estc->add_option("--n0", n0, "first index considered");
  estc->add_option("--reps", c_reps, "Monte Carlo replications");
  estc->add_option("--horizon", horizon, "truncation horizon");
  estc->add_option("--seed", c_seed, "seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (print_template) {
        std::cout << vscreen::ExperimentConfig().to_json() << "\n";
        return 0;
      }
      if (config_path.empty())
        throw std::invalid_argument("run requires --config (or --print-config)");
      vscreen::ExperimentConfig config = load_config(config_path);
      if (reps > 0) config.replications = reps;
      if (seed_opt->count() > 0) config.seed = seed_override;
      if (!out_path.empty()) config.out_path = out_path;
      (void)has_seed;
      print_result(vscreen::run_experiment(config, jobs));
    } else if (sweep->parsed()) {
      vscreen::ExperimentConfig config = load_config(config_path);
      if (!out_path.empty()) config.out_path = out_path;
      vscreen::SweepSpec spec{sweep_axis, sweep_values};
      for (const auto& result : vscreen::run_sweep(config, spec, jobs))
        print_result(result);
    } else if (est->parsed()) {
      vscreen::ProblemSpec spec;
      spec.kind = kind;
      spec.row = row;
      spec.k = k_alt;
      spec.gap = gap;
      spec.L = L;
      spec.equality_mode = equality;
      spec.mean_reps = mean_reps;
      spec.instance_seed = mean_seed;
      const vscreen::ProblemBundle bundle =
          vscreen::build_problem(spec, m_sub);
      nlohmann::json j;
      j["k"] = bundle.k;
      j["means"] = bundle.true_means;
      j["means_are_offsets_only"] = bundle.means_are_offsets_only;
      if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
      } else {
        std::ofstream out(out_path);
        out << j.dump(2) << "\n";
      }
    } else if (alloc->parsed()) {
      const auto allocations = vscreen::enumerate_allocations(L, equality);
      if (!out_path.empty()) {
        std::ofstream out(out_path);
        for (std::size_t i = 0; i < allocations.size(); ++i) {
          nlohmann::json j;
          j["id"] = i;
          j["x"] = allocations[i];
          out << j.dump() << "\n";
        }
      }
      std::cout << allocations.size() << " feasible allocations for L=" << L
                << (equality ? " (equality)" : "") << "\n";
    } else if (collect->parsed()) {
      vscreen::LlmEndpointConfig endpoint;
      endpoint.base_url = base_url;
      endpoint.model = model;
      endpoint.dialect = dialect;
      endpoint.api_key_env = api_key_env;
      endpoint.discard_above = discard_above;
      const vscreen::AlternativeCatalog catalog =
          vscreen::laptop_catalog(catalog_k);
      const vscreen::PromptTemplate prompt =
          vscreen::wtp_survey_template(catalog.attribute_names);
      vscreen::CollectOptions options;
      options.per_alt = per_alt;
      options.out_path = out_path;
      const vscreen::CollectReport report =
          vscreen::collect_dataset(endpoint, catalog, prompt, options);
      std::cout << "queries " << report.queries_sent << " observations "
                << report.observations << " skipped "
                << report.skipped_complete << "\n";
    } else if (analyze->parsed()) {
      const vscreen::EmpiricalDataset data =
          vscreen::load_empirical(stream_path);
      nlohmann::json out = nlohmann::json::array();
      for (std::size_t i = 0; i < data.observations.size(); ++i) {
        const vscreen::StreamAnalysis a = vscreen::analyze_stream(
            data.observations[i], n0, mu, boundaries, radii);
        nlohmann::json rec;
        rec["id"] = i;
        rec["min_running_avg"] = a.min_running_avg;
        rec["argmin_index"] = a.argmin_index;
        for (const auto& [b, t] : a.crossing_times)
          rec["crossing"][std::to_string(b)] =
              t ? nlohmann::json(*t) : nlohmann::json(nullptr);
        for (const auto& [r, t] : a.last_exit)
          rec["last_exit"][std::to_string(r)] =
              t ? nlohmann::json(*t) : nlohmann::json(nullptr);
        out.push_back(rec);
      }
      std::cout << out.dump(2) << "\n";
    } else if (estc->parsed()) {
      const vscreen::CBoundaryEstimate est_c =
          vscreen::estimate_C(z, n0, c_reps, horizon, c_seed);
      std::cout << "C(" << z << "; " << n0 << ") ~= " << est_c.estimate
                << " se " << est_c.standard_error << " truncated "
                << est_c.truncation_fraction << "\n";
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
