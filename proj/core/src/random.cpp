#include "stagebo/random.hpp"

namespace stagebo {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(splitmix64(base) ^ (stream * 0xd6e8feb86659fd93ULL + 0x632be59bd9b4e019ULL));
}

Matrix uniform_unit(Rng& rng, Eigen::Index n, Eigen::Index dim) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix out(n, dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) out(i, j) = unif(rng);
  }
  return out;
}

Matrix scale_to_bounds(const Matrix& unit, const Bounds& bounds) {
  Matrix out(unit.rows(), unit.cols());
  for (Eigen::Index j = 0; j < unit.cols(); ++j) {
    const auto& b = bounds[static_cast<std::size_t>(j)];
    out.col(j) = (unit.col(j).array() * b.span() + b.lo).matrix();
  }
  return out;
}

}  // namespace stagebo
