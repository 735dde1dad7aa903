#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "stagebo/common.hpp"
#include "stagebo/preference.hpp"
#include "stagebo/surrogate.hpp"

namespace stagebo::acq {

/// One GP per objective, plus one per external constraint.
struct SurrogateSet {
  std::vector<gp::GpModel> objectives;
  std::vector<gp::GpModel> constraints;
};

/// Augmented epsilon-constraint subproblem: maximize
///   f_k + slack * sum_{j != k} f_j
/// subject to f_j >= epsilon_j (j != k), g_l >= 0, and optionally the
/// preference region on the j != k coordinates.
struct EpsilonSubproblem {
  std::size_t primary = 0;
  double slack = 1e-3;
  /// Indices j != k, ascending; aligned with `epsilons`.
  std::vector<std::size_t> constrained_objectives;
  /// Thresholds in original objective units; exactly m - 1 entries.
  Vector epsilons;
  /// Thresholds for the external constraints (all zero; g >= 0 is feasible).
  Vector external_thresholds;
  std::optional<PreferenceBox> preference;
  /// Best augmented value over observations satisfying every constraint of
  /// the subproblem; empty when no observation does.
  std::optional<double> incumbent;

  std::size_t num_objectives() const { return constrained_objectives.size() + 1; }
};

/// Closed-form expected improvement of a Gaussian N(mean, stdev^2) over
/// `incumbent`. Falls back to max(0, mean - incumbent) when stdev < 1e-12.
double expected_improvement(double mean, double stdev, double incumbent);

/// Product of independent Gaussian tail probabilities P(f_j >= threshold_j).
/// Zero-stdev entries contribute exact 0/1 indicators.
double probability_of_feasibility(const Vector& means, const Vector& stdevs, const Vector& thresholds);

/// Augmented objective value y_k + slack * sum_{j != k} y_j.
double augmented_value(const Vector& y, std::size_t primary, double slack);

/// Whether an observation satisfies every constraint of `sub`.
bool satisfies(const EpsilonSubproblem& sub, const Vector& y, const Vector& g);

/// Incumbent over rows of (ys, gs) satisfying `sub` (see EpsilonSubproblem).
std::optional<double> compute_incumbent(const EpsilonSubproblem& sub, const Matrix& ys, const Matrix& gs);

/// Per-point breakdown of the acquisition.
struct CeiTerms {
  double value = 0.0;
  double expected_improvement = 0.0;
  double feasibility = 1.0;
  double primary_mean = 0.0;
};

/// Constrained expected improvement at each row of `xs`. With no incumbent
/// the value is the probability of feasibility alone.
std::vector<CeiTerms> cei_terms(const Matrix& xs, const EpsilonSubproblem& sub, const SurrogateSet& models);

double cei(const Vector& x, const EpsilonSubproblem& sub, const SurrogateSet& models);

struct MaximizeOptions {
  std::size_t starts = 20;
  std::size_t probes = 512;
  std::size_t iterations = 128;
};

struct Maximizer {
  Vector x;
  double value = 0.0;
  /// True when every probe scored zero and the max-feasibility probe was returned.
  bool fallback = false;
};

/// Multi-start maximization: scores Sobol probes, then refines the best
/// `starts` of them with a compass pattern search inside `bounds`.
/// Deterministic given `seed`.
Maximizer maximize_cei(const EpsilonSubproblem& sub, const SurrogateSet& models, const Bounds& bounds,
                       std::uint64_t seed, const MaximizeOptions& options = {});

}  // namespace stagebo::acq
