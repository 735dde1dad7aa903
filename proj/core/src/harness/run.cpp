#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "stagebo/harness.hpp"
#include "stagebo/pareto.hpp"
#include "stagebo/random.hpp"

namespace stagebo::harness {

namespace {

constexpr std::uint64_t kRunStream = 0x57a6e;
constexpr std::uint64_t kRandomStream = 0x7a4d;

Matrix feasible_objectives(const stage::Dataset& data, bool constrained) {
  if (!constrained) return data.y;
  const auto mask = data.feasible_mask();
  std::vector<Vector> rows;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    if (mask[static_cast<std::size_t>(i)]) rows.push_back(data.y.row(i).transpose());
  }
  return stack_rows(rows, data.y.cols());
}

RunRecord measure(const stage::Dataset& data, bool constrained, const Matrix& reference, const Vector& ref_point) {
  RunRecord r;
  const auto mask = data.feasible_mask();
  const auto feasible = static_cast<double>(std::count(mask.begin(), mask.end(), true));
  r.feasible_ratio = data.size() > 0 ? feasible / static_cast<double>(data.size()) : 0.0;
  const Matrix obs = feasible_objectives(data, constrained);
  if (obs.rows() == 0) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    r.hv = 0.0;
    r.igd = r.igd_plus = r.fill_distance = nan;
    r.flags.emplace_back("no_feasible");
    return r;
  }
  r.hv = pareto::hypervolume(pareto::pareto_filter(obs), ref_point);
  r.igd = pareto::igd(obs, reference);
  r.igd_plus = pareto::igd_plus(obs, reference);
  r.fill_distance = pareto::fill_distance(obs, reference);
  return r;
}

void add_flags(std::vector<std::string>& into, const std::vector<std::string>& flags) {
  for (const auto& f : flags) {
    if (std::find(into.begin(), into.end(), f) == into.end()) into.push_back(f);
  }
}

}  // namespace

SeedResult run_seed(const RunConfig& config, const problems::ProblemSpec& problem, const Matrix& reference,
                    std::uint64_t seed) {
  const std::size_t init = init_size(config, problem);
  if (config.budget <= init) throw ConfigError("budget must exceed init");
  const std::size_t iterations = config.budget - init;
  const std::uint64_t run_seed_value = derive_seed(seed, kRunStream);
  const bool constrained = config.mode != stage::Mode::unconstrained && problem.constrained();
  const Vector ref_point = metric_reference_point(problem, config.mode);

  SeedResult result;
  std::optional<stage::LoopState> state;
  Matrix baseline_points;
  if (config.algorithm == Algorithm::stage) {
    state = stage::initialize(problem, config.mode, config.stage, run_seed_value, init);
  } else {
    const Matrix design = stage::initial_design(problem, run_seed_value, init);
    if (config.algorithm == Algorithm::sobol) {
      baseline_points = stage::initial_design(problem, run_seed_value, config.budget);
    } else {
      Rng rng(derive_seed(run_seed_value, kRandomStream));
      baseline_points.resize(static_cast<Eigen::Index>(config.budget), static_cast<Eigen::Index>(problem.dim_x));
      baseline_points.topRows(static_cast<Eigen::Index>(init)) = design;
      baseline_points.bottomRows(static_cast<Eigen::Index>(iterations)) = scale_to_bounds(
          uniform_unit(rng, static_cast<Eigen::Index>(iterations), static_cast<Eigen::Index>(problem.dim_x)),
          problem.bounds);
    }
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(init); ++i) {
      const Vector xi = baseline_points.row(i).transpose();
      result.data.append(xi, problems::evaluate(problem, xi));
    }
  }

  std::vector<std::string> pending_flags;
  double elapsed = 0.0;
  for (std::size_t t = 1; t <= iterations; ++t) {
    const auto start = std::chrono::steady_clock::now();
    if (state) {
      const auto step = stage::step(*state);
      add_flags(pending_flags, step.flags);
    } else {
      const Vector xi = baseline_points.row(static_cast<Eigen::Index>(init + t - 1)).transpose();
      result.data.append(xi, problems::evaluate(problem, xi));
    }
    elapsed += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (t % config.metrics_every != 0 && t != iterations) continue;

    const auto& data = state ? state->data : result.data;
    RunRecord record = measure(data, constrained, reference, ref_point);
    record.seed = seed;
    record.iteration = t;
    record.wall_seconds = config.wall_clock ? elapsed : 0.0;
    add_flags(record.flags, pending_flags);
    pending_flags.clear();
    elapsed = 0.0;
    result.records.push_back(std::move(record));
  }
  if (state) result.data = std::move(state->data);
  const Matrix obs = feasible_objectives(result.data, constrained);
  result.front = obs.rows() > 0 ? pareto::pareto_filter(obs) : Matrix(0, obs.cols());
  return result;
}

std::vector<RunRecord> run(const RunConfig& config) {
  const auto problem = validate(config);
  const auto reference_full = reference_front(problem, config.resolved_cache_dir(), config.front_points);
  const Matrix reference = metric_front(problem, config.mode, reference_full.points);

  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + config.out_dir.string());

  const auto& seeds = config.seeds;
  std::vector<std::vector<RunRecord>> per_seed(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        const auto seed = seeds[i];
        auto result = run_seed(config, problem, reference, seed);
        export_records(result.records, config.out_dir / fmt::format("seed_{}.csv", seed));
        if (config.write_json) {
          export_records(result.records, config.out_dir / fmt::format("seed_{}.json", seed));
        }
        write_front_csv(config.out_dir / fmt::format("front_seed_{}.csv", seed), result.front);
        per_seed[i] = std::move(result.records);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(config.jobs, 1, seeds.size());
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<RunRecord> all;
  for (auto& records : per_seed) all.insert(all.end(), records.begin(), records.end());
  return all;
}

}  // namespace stagebo::harness
