#pragma once

#include <span>
#include <vector>

#include "stagebo/common.hpp"

namespace stagebo {

/// Region of interest in objective space, given as lower corner `lower`
/// (minimum acceptable values) and upper corner `upper` (ideal limits).
///
/// A point satisfies the region when it clears either bound set on the
/// selected coordinates: all of them >= lower, or all of them <= upper.
struct PreferenceBox {
  Vector lower;
  Vector upper;

  /// Builds a box from two arbitrary corners, normalizing to
  /// lower-left / upper-right per coordinate.
  static PreferenceBox from_corners(const Vector& a, const Vector& b);

  Eigen::Index dim() const { return lower.size(); }

  /// Summed shortfall below `lower` over `coords` (all coordinates if empty).
  double lower_violation(const Vector& y, std::span<const std::size_t> coords = {}) const;
  /// Summed excess above `upper` over `coords` (all coordinates if empty).
  double upper_violation(const Vector& y, std::span<const std::size_t> coords = {}) const;
  /// min(lower_violation, upper_violation): zero iff `y` satisfies either set.
  double violation(const Vector& y, std::span<const std::size_t> coords = {}) const;
  bool contains(const Vector& y, std::span<const std::size_t> coords = {}) const {
    return violation(y, coords) <= 0.0;
  }
};

/// Rows of `points` that satisfy `box` on every coordinate.
Matrix clip_to_region(const Matrix& points, const PreferenceBox& box);

}  // namespace stagebo
