#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace stagebo {

using Vector = Eigen::VectorXd;
/// Point sets are stored row-wise: one point per row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double span() const { return hi - lo; }
};

/// Axis-aligned box, one interval per input dimension.
using Bounds = std::vector<Interval>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the problem domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Non-finite or malformed training data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Factorization failed even after jitter escalation.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Invalid arguments to a pure function (e.g. empty point sets).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A reference front was requested but none exists yet.
class UnavailableError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration; detected before any evaluation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Stack row vectors into a point matrix.
Matrix stack_rows(const std::vector<Vector>& rows, Eigen::Index cols);

/// Maps a point from `bounds` to the unit cube.
Vector to_unit(const Vector& x, const Bounds& bounds);
/// Maps a unit-cube point back into `bounds`.
Vector from_unit(const Vector& u, const Bounds& bounds);

}  // namespace stagebo
