// stagebo command-line driver.
//
// Exit codes: 0 success, 2 configuration error, 1 runtime error.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "stagebo/harness.hpp"
#include "stagebo/problems.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 1;

struct RunArgs {
  std::string config_file;
  std::vector<std::string> settings;
  std::string problem, mode, budget, seeds, algorithm, out, init, metrics_every, jobs;
  bool json = false;
  bool no_wall_clock = false;
};

stagebo::harness::RunConfig build_config(const RunArgs& args) {
  using stagebo::harness::apply_setting;
  stagebo::harness::RunConfig config;
  if (!args.config_file.empty()) stagebo::harness::apply_config_file(config, args.config_file);
  if (const char* env = std::getenv("STAGEBO_OUT_DIR"); env != nullptr && *env != '\0') {
    apply_setting(config, "out_dir", env);
  }
  for (const auto& kv : args.settings) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw stagebo::ConfigError("--set expects key=value, got '" + kv + "'");
    apply_setting(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  const std::pair<const char*, const std::string*> flags[] = {
      {"problem", &args.problem}, {"mode", &args.mode},         {"budget", &args.budget},
      {"seeds", &args.seeds},     {"algorithm", &args.algorithm}, {"out_dir", &args.out},
      {"init", &args.init},       {"metrics_every", &args.metrics_every}, {"jobs", &args.jobs}};
  for (const auto& [key, value] : flags) {
    if (!value->empty()) apply_setting(config, key, *value);
  }
  if (args.json) config.write_json = true;
  if (args.no_wall_clock) config.wall_clock = false;
  return config;
}

int list_problems() {
  for (const auto& p : stagebo::problems::catalog()) {
    fmt::print("{:<10} d={:<3} m={} c={} front={}{}\n", p.name, p.dim_x, p.dim_y, p.dim_c,
               p.has_analytic_front() ? "analytic" : "cached", p.preference ? " preference" : "");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pareto front exploration by targeted epsilon-constraint Bayesian optimization"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run an optimizer on a benchmark problem");
  run->add_option("-c,--config", run_args.config_file, "key = value config file");
  run->add_option("--set", run_args.settings, "Extra key=value setting (repeatable)");
  run->add_option("--problem", run_args.problem, "Problem name");
  run->add_option("--mode", run_args.mode, "unconstrained | constrained | preference");
  run->add_option("--budget", run_args.budget, "Total evaluations per seed");
  run->add_option("--seed,--seeds", run_args.seeds, "Seeds, e.g. 0,1,2 or 0-4");
  run->add_option("--algorithm", run_args.algorithm, "stage | random | sobol");
  run->add_option("--out", run_args.out, "Output directory");
  run->add_option("--init", run_args.init, "Initial design size");
  run->add_option("--metrics-every", run_args.metrics_every, "Record every n iterations");
  run->add_option("--jobs", run_args.jobs, "Parallel seeds");
  run->add_flag("--json", run_args.json, "Also write JSON records");
  run->add_flag("--no-wall-clock", run_args.no_wall_clock, "Write wall_seconds as 0");

  std::string summary_dir;
  auto* summarize = app.add_subcommand("summarize", "Aggregate seed_*.csv files across seeds");
  summarize->add_option("dir", summary_dir, "Run output directory")->required();

  std::string front_problem;
  std::string cache_dir = "results/fronts";
  std::string front_out;
  std::size_t front_points = 1000;
  auto* front = app.add_subcommand("reference-front", "Build or load a problem's reference front");
  front->add_option("--problem", front_problem, "Problem name")->required();
  front->add_option("--cache-dir", cache_dir, "Cache directory for evolutionary fronts");
  front->add_option("--points", front_points, "Points sampled from analytic fronts");
  front->add_option("--out", front_out, "Also write the front to this CSV");

  auto* list = app.add_subcommand("list-problems", "List registered problems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (list->parsed()) return list_problems();
    if (run->parsed()) {
      const auto config = build_config(run_args);
      const auto records = stagebo::harness::run(config);
      fmt::print("wrote {} records for {} seed(s) to {}\n", records.size(), config.seeds.size(),
                 config.out_dir.string());
      return 0;
    }
    if (summarize->parsed()) {
      const auto rows = stagebo::harness::summarize_directory(summary_dir);
      fmt::print("summarized {} iterations into {}/summary.csv\n", rows.size(), summary_dir);
      return 0;
    }
    if (front->parsed()) {
      const auto problem = stagebo::problems::find_problem(front_problem);
      if (!problem) throw stagebo::ConfigError("unknown problem '" + front_problem + "'");
      const auto ref = stagebo::harness::reference_front(*problem, cache_dir, front_points);
      if (!front_out.empty()) stagebo::write_front_csv(front_out, ref.points);
      fmt::print("{}: {} points ({})\n", problem->name, ref.points.rows(),
                 ref.provenance == stagebo::problems::FrontProvenance::analytic ? "analytic" : "cached");
      return 0;
    }
  } catch (const stagebo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
