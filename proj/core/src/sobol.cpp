#include <cmath>

#include <boost/random/sobol.hpp>

#include "stagebo/random.hpp"

namespace stagebo {

Matrix sobol_unit(Eigen::Index n, Eigen::Index dim, std::uint64_t seed, Eigen::Index skip) {
  boost::random::sobol engine(static_cast<std::size_t>(dim));
  // The first point of the sequence is the origin.
  engine.discard(static_cast<std::uintmax_t>((1 + skip) * dim));

  Rng rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector shift(dim);
  for (Eigen::Index j = 0; j < dim; ++j) shift[j] = unif(rng);

  constexpr double kScale = 0x1p-64;
  Matrix out(n, dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double u = static_cast<double>(engine()) * kScale + shift[j];
      out(i, j) = u - std::floor(u);
    }
  }
  return out;
}

}  // namespace stagebo
