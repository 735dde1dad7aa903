#include <algorithm>
#include <numeric>

#include "stagebo/pareto.hpp"

namespace stagebo::pareto {

namespace {

// All routines below work on points translated so the reference point is
// the origin; every coordinate is strictly positive.

double volume_2d(Matrix pts) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(pts.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return pts(a, 0) > pts(b, 0); });
  double area = 0.0;
  double top = 0.0;
  for (auto i : order) {
    if (pts(i, 1) > top) {
      area += pts(i, 0) * (pts(i, 1) - top);
      top = pts(i, 1);
    }
  }
  return area;
}

double volume(const Matrix& pts);

// Exclusive-contribution recursion: with rows sorted ascending in the last
// coordinate, the overlap of box k with every later box has height
// pts(k, last), so it reduces to a hypervolume one dimension down.
double volume_sliced(const Matrix& input) {
  const Eigen::Index n = input.rows();
  const Eigen::Index m = input.cols();
  const Eigen::Index last = m - 1;

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return input(a, last) < input(b, last); });
  Matrix pts(n, m);
  for (Eigen::Index i = 0; i < n; ++i) pts.row(i) = input.row(order[static_cast<std::size_t>(i)]);

  double total = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double own = pts.row(k).prod();
    const Eigen::Index later = n - k - 1;
    if (later == 0) {
      total += own;
      continue;
    }
    Matrix limits(later, last);
    for (Eigen::Index j = 0; j < later; ++j) {
      limits.row(j) = pts.row(k).head(last).cwiseMin(pts.row(k + 1 + j).head(last));
    }
    total += own - pts(k, last) * volume(pareto_filter(limits));
  }
  return total;
}

double volume(const Matrix& pts) {
  if (pts.rows() == 0) return 0.0;
  if (pts.cols() == 1) return pts.maxCoeff();
  if (pts.rows() == 1) return pts.row(0).prod();
  if (pts.cols() == 2) return volume_2d(pts);
  return volume_sliced(pts);
}

}  // namespace

double hypervolume(const Matrix& front, const Vector& ref) {
  if (front.rows() == 0) return 0.0;
  if (front.cols() != ref.size()) throw ArgumentError("hypervolume: reference point dimension mismatch");

  std::vector<Vector> shifted;
  for (Eigen::Index i = 0; i < front.rows(); ++i) {
    Vector q = front.row(i).transpose() - ref;
    if ((q.array() > 0.0).all()) shifted.push_back(std::move(q));
  }
  if (shifted.empty()) return 0.0;
  return volume(pareto_filter(stack_rows(shifted, ref.size())));
}

}  // namespace stagebo::pareto
