#include "stagebo/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace stagebo::pareto {

namespace {

std::vector<std::size_t> pareto_indices_2d(const Matrix& points) {
  const auto n = static_cast<std::size_t>(points.rows());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ia = static_cast<Eigen::Index>(a);
    const auto ib = static_cast<Eigen::Index>(b);
    if (points(ia, 0) != points(ib, 0)) return points(ia, 0) > points(ib, 0);
    if (points(ia, 1) != points(ib, 1)) return points(ia, 1) > points(ib, 1);
    return a < b;
  });
  std::vector<std::size_t> kept;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t idx : order) {
    const double y1 = points(static_cast<Eigen::Index>(idx), 1);
    if (y1 > best) {
      kept.push_back(idx);
      best = y1;
    }
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

void check_distance_args(const Matrix& observations, const Matrix& ref_front) {
  if (observations.rows() == 0 || ref_front.rows() == 0) {
    throw ArgumentError("distance indicators need non-empty point sets");
  }
  if (observations.cols() != ref_front.cols()) {
    throw ArgumentError("observation and reference fronts differ in dimension");
  }
}

/// For every reference row, the minimum of `dist(ref_row, obs_row)` over observations.
template <typename Dist>
Vector nearest_distances(const Matrix& observations, const Matrix& ref_front, Dist dist) {
  check_distance_args(observations, ref_front);
  Vector out(ref_front.rows());
  for (Eigen::Index i = 0; i < ref_front.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < observations.rows(); ++j) {
      best = std::min(best, dist(ref_front.row(i), observations.row(j)));
    }
    out[i] = best;
  }
  return out;
}

}  // namespace

std::vector<std::size_t> pareto_indices(const Matrix& points) {
  const auto n = points.rows();
  if (points.cols() == 2) return pareto_indices_2d(points);

  std::vector<std::size_t> kept;
  for (Eigen::Index i = 0; i < n; ++i) {
    bool keep = true;
    for (Eigen::Index j = 0; j < n && keep; ++j) {
      if (j == i) continue;
      if (dominates(points.row(j), points.row(i))) keep = false;
      else if (j < i && points.row(j) == points.row(i)) keep = false;
    }
    if (keep) kept.push_back(static_cast<std::size_t>(i));
  }
  return kept;
}

Matrix pareto_filter(const Matrix& points) {
  const auto idx = pareto_indices(points);
  Matrix out(static_cast<Eigen::Index>(idx.size()), points.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = points.row(static_cast<Eigen::Index>(idx[i]));
  }
  return out;
}

double igd(const Matrix& observations, const Matrix& ref_front) {
  const Vector d = nearest_distances(observations, ref_front,
                                     [](const auto& r, const auto& o) { return (r - o).norm(); });
  return d.mean();
}

double igd_plus(const Matrix& observations, const Matrix& ref_front) {
  const Vector d = nearest_distances(observations, ref_front, [](const auto& r, const auto& o) {
    return (r - o).cwiseMax(0.0).norm();
  });
  return d.mean();
}

double fill_distance(const Matrix& observations, const Matrix& ref_front) {
  const Vector d = nearest_distances(observations, ref_front,
                                     [](const auto& r, const auto& o) { return (r - o).norm(); });
  return d.maxCoeff();
}

Matrix ParetoArchive::feasible_points() const {
  std::vector<Vector> rows;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    if (feasible(i)) rows.emplace_back(points.row(i).transpose());
  }
  return stack_rows(rows, points.cols());
}

double feasible_ratio(const ParetoArchive& archive) {
  if (archive.size() == 0) throw ArgumentError("feasible_ratio of an empty archive");
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < archive.size(); ++i) count += archive.feasible(i) ? 1 : 0;
  return static_cast<double>(count) / static_cast<double>(archive.size());
}

}  // namespace stagebo::pareto
