#include "stagebo/preference.hpp"

#include <algorithm>

namespace stagebo {

namespace {

template <typename Fn>
double sum_over(const Vector& y, std::span<const std::size_t> coords, Fn fn) {
  double total = 0.0;
  if (coords.empty()) {
    for (Eigen::Index i = 0; i < y.size(); ++i) total += fn(i);
  } else {
    for (std::size_t c : coords) total += fn(static_cast<Eigen::Index>(c));
  }
  return total;
}

}  // namespace

PreferenceBox PreferenceBox::from_corners(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw ArgumentError("preference corners differ in dimension");
  PreferenceBox box{a.cwiseMin(b), a.cwiseMax(b)};
  return box;
}

double PreferenceBox::lower_violation(const Vector& y, std::span<const std::size_t> coords) const {
  return sum_over(y, coords, [&](Eigen::Index i) { return std::max(0.0, lower[i] - y[i]); });
}

double PreferenceBox::upper_violation(const Vector& y, std::span<const std::size_t> coords) const {
  return sum_over(y, coords, [&](Eigen::Index i) { return std::max(0.0, y[i] - upper[i]); });
}

double PreferenceBox::violation(const Vector& y, std::span<const std::size_t> coords) const {
  return std::min(lower_violation(y, coords), upper_violation(y, coords));
}

Matrix clip_to_region(const Matrix& points, const PreferenceBox& box) {
  std::vector<Vector> kept;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    Vector y = points.row(i).transpose();
    if (box.contains(y)) kept.push_back(std::move(y));
  }
  return stack_rows(kept, points.cols());
}

}  // namespace stagebo
