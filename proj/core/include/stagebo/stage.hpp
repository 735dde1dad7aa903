#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stagebo/acquisition.hpp"
#include "stagebo/common.hpp"
#include "stagebo/evo.hpp"
#include "stagebo/preference.hpp"
#include "stagebo/problems.hpp"
#include "stagebo/random.hpp"
#include "stagebo/surrogate.hpp"

namespace stagebo::stage {

enum class Mode { unconstrained, constrained, preference };
enum class ObjectiveSchedule { round_robin, random, feasible };
enum class TargetRule { maxmin, random_lexicographic };
enum class QueryRule { cei, direct_sample };

struct StageConfig {
  double slack = 1e-3;
  std::size_t nsga_population = 300;
  std::size_t nsga_generations = 50;
  std::size_t cei_starts = 20;
  std::size_t rff_features = 512;
  ObjectiveSchedule objective_schedule = ObjectiveSchedule::round_robin;
  TargetRule target_rule = TargetRule::maxmin;
  QueryRule query_rule = QueryRule::cei;
  /// Min-max normalize objectives before the maxmin distance computation.
  bool normalize_objectives = false;
  int gp_restarts = 8;
  int gp_max_iterations = 60;
};

/// Observed inputs, objectives and constraint values, one row per evaluation.
struct Dataset {
  Matrix x;
  Matrix y;
  Matrix g;

  Eigen::Index size() const { return x.rows(); }
  void append(const Vector& xi, const problems::Evaluation& e);
  /// Rows whose constraint values are all >= 0.
  std::vector<bool> feasible_mask() const;
};

/// Loop state; single-threaded.
struct LoopState {
  problems::ProblemSpec problem;
  Mode mode = Mode::unconstrained;
  StageConfig config;
  std::uint64_t seed = 0;
  Dataset data;
  /// Post-initialization evaluations so far.
  std::size_t iteration = 0;
  acq::SurrogateSet models;

  /// Whether external constraints are modeled.
  bool uses_constraints() const { return mode != Mode::unconstrained && problem.dim_c > 0; }
  const std::optional<PreferenceBox>& preference() const { return problem.preference; }
};

/// Sampled Pareto front with the inputs that produced each point.
struct SampledFront {
  Matrix objectives;
  Matrix inputs;
  /// No feasible individual survived; the least-violating front was returned.
  bool fallback = false;
};

/// First `init` points of the scrambled Sobol design over the problem
/// bounds for `seed`; longer designs extend shorter ones.
Matrix initial_design(const problems::ProblemSpec& problem, std::uint64_t seed, std::size_t init);

/// Evaluates `init` scrambled Sobol points over the problem bounds and fits
/// the models. Throws ArgumentError when `init` < 2, ConfigError when
/// the mode does not fit the problem.
LoopState initialize(const problems::ProblemSpec& problem, Mode mode, const StageConfig& config,
                     std::uint64_t seed, std::size_t init);

/// Refits every output model on the current dataset.
void refit(LoopState& state);

/// NSGA-II front of an arbitrary vector function (used with sampled paths).
SampledFront solve_front(const evo::BatchObjective& fn, const Bounds& bounds, const StageConfig& config,
                         std::uint64_t seed);

/// Draws one path per modeled output and returns the front of the sampled
/// objectives. Path constraints and the preference region act as NSGA-II
/// constraints.
SampledFront sampled_front(const LoopState& state, std::uint64_t seed);

/// Index of the front point farthest from its nearest observation; ties go
/// to the lowest index. Throws ArgumentError on empty input.
std::size_t select_target(const Matrix& front, const Matrix& observations, bool normalize = false);

/// Primary objective index in [0, m). `target` and `observations` are
/// required for the feasible schedule.
std::size_t select_objective(std::size_t t, std::size_t m, ObjectiveSchedule schedule, Rng& rng,
                             const Vector* target = nullptr, const Matrix* observations = nullptr);

/// Thresholds drawn one objective at a time, each uniform over the range of
/// the observed Pareto points that satisfy the thresholds drawn so far.
/// Every threshold is met by at least one observation.
Vector lexicographic_target(const Matrix& observations, Rng& rng);

/// Epsilon thresholds min(target_j, max observed j) for j != k, external
/// constraint thresholds at zero, and the preference region if given.
acq::EpsilonSubproblem build_subproblem(const Vector& target, const Matrix& observations, std::size_t k,
                                        const StageConfig& config, std::size_t num_constraints,
                                        const std::optional<PreferenceBox>& preference);

struct StepResult {
  Vector x;
  Vector target;
  std::size_t primary = 0;
  std::vector<std::string> flags;
};

/// One iteration: sample front, pick target and objective, query, evaluate,
/// append and refit.
StepResult step(LoopState& state);

}  // namespace stagebo::stage
