#include "stagebo/common.hpp"

namespace stagebo {

Matrix stack_rows(const std::vector<Vector>& rows, Eigen::Index cols) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  }
  return out;
}

Vector to_unit(const Vector& x, const Bounds& bounds) {
  Vector u(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const auto& b = bounds[static_cast<std::size_t>(i)];
    u[i] = (x[i] - b.lo) / b.span();
  }
  return u;
}

Vector from_unit(const Vector& u, const Bounds& bounds) {
  Vector x(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const auto& b = bounds[static_cast<std::size_t>(i)];
    x[i] = b.lo + u[i] * b.span();
  }
  return x;
}

}  // namespace stagebo
