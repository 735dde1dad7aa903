#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "stagebo/common.hpp"

namespace stagebo::evo {

/// Individuals with their objective values (maximized), total constraint
/// violation (0 when feasible), non-domination rank and crowding distance.
struct Population {
  Matrix individuals;
  Matrix objectives;
  Vector constraint_violation;
  std::vector<int> rank;
  Vector crowding;

  Eigen::Index size() const { return individuals.rows(); }
  bool feasible(Eigen::Index i) const { return constraint_violation[i] <= 0.0; }
};

/// Evaluates every row of `xs`, filling `objectives` (rows x m) and
/// `violation` (rows). Implementations must be deterministic.
using BatchObjective = std::function<void(const Matrix& xs, Matrix& objectives, Vector& violation)>;

/// Point-wise objective: x -> (objective vector, total violation).
using PointObjective = std::function<std::pair<Vector, double>(const Vector&)>;

/// Adapts a point-wise objective into a batch one.
BatchObjective batched(PointObjective fn);

/// Fast non-dominated sort under maximization. Returns index fronts,
/// best first.
std::vector<std::vector<std::size_t>> non_dominated_sort(const Matrix& points);

/// Canonical NSGA-II crowding distance of each row of `front`; per-objective
/// extremes get +infinity.
Vector crowding_distance(const Matrix& front);

struct Nsga2Options {
  std::size_t population = 300;
  std::size_t generations = 50;
  double crossover_rate = 0.9;
  double crossover_eta = 15.0;
  double mutation_eta = 20.0;
  /// Per-variable mutation probability; defaults to 1/d.
  std::optional<double> mutation_rate;
  /// Called after each generation's survival step with the current parents.
  std::function<void(std::size_t generation, const Population&)> on_generation;
};

/// NSGA-II with SBX crossover, polynomial mutation, and Deb's feasibility
/// rules. Individuals with non-finite objectives or violation are
/// quarantined at the worst rank. Returns the first front of the final
/// population (the least-violating individuals when nothing is feasible).
/// Deterministic given `seed`.
Population nsga2(const BatchObjective& fn, const Bounds& bounds, const Nsga2Options& options,
                 std::uint64_t seed);

}  // namespace stagebo::evo
