#pragma once

#include <vector>

#include "stagebo/common.hpp"

namespace stagebo::pareto {

/// `a` dominates `b` under maximization: no worse everywhere, better somewhere.
template <typename A, typename B>
bool dominates(const A& a, const B& b) {
  bool strictly_better = false;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return false;
    if (a[i] > b[i]) strictly_better = true;
  }
  return strictly_better;
}

/// Indices of rows not dominated by any other row. Exact duplicates are
/// reported once (first occurrence). Order follows the input.
std::vector<std::size_t> pareto_indices(const Matrix& points);

/// Non-dominated subset of `points` (see pareto_indices).
Matrix pareto_filter(const Matrix& points);

/// Exact dominated hypervolume above `ref` (maximization).
/// Points that fail to strictly exceed `ref` in every coordinate contribute nothing.
double hypervolume(const Matrix& front, const Vector& ref);

/// Mean over `ref_front` of the Euclidean distance to the nearest observation.
double igd(const Matrix& observations, const Matrix& ref_front);

/// IGD with the one-sided distance sqrt(sum_i max(r_i - o_i, 0)^2) for
/// reference point r and observation o.
double igd_plus(const Matrix& observations, const Matrix& ref_front);

/// Max over `ref_front` of the distance to the nearest observation.
double fill_distance(const Matrix& observations, const Matrix& ref_front);

/// Observed objective vectors, with an optional feasibility mask
/// (empty mask: every point is feasible).
struct ParetoArchive {
  Matrix points;
  std::vector<bool> feasible_mask;

  Eigen::Index size() const { return points.rows(); }
  bool feasible(Eigen::Index i) const {
    return feasible_mask.empty() || feasible_mask[static_cast<std::size_t>(i)];
  }
  /// Rows flagged feasible.
  Matrix feasible_points() const;
};

/// Fraction of archive points that are feasible.
double feasible_ratio(const ParetoArchive& archive);

}  // namespace stagebo::pareto
