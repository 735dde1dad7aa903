#pragma once

#include <cstdint>
#include <random>

#include "stagebo/common.hpp"

namespace stagebo {

using Rng = std::mt19937_64;

/// Derives an independent stream seed from a base seed and a stream tag.
/// Used to give every (run, iteration, output) its own reproducible RNG.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return derive_seed(derive_seed(base, a), b);
}

/// `n` points drawn uniformly from the unit cube of dimension `dim`.
Matrix uniform_unit(Rng& rng, Eigen::Index n, Eigen::Index dim);

/// Row-wise mapping of unit-cube points into `bounds`.
Matrix scale_to_bounds(const Matrix& unit, const Bounds& bounds);

/// First `n` points of a Sobol sequence with a seeded random shift
/// (Cranley-Patterson rotation), skipping the leading origin point.
/// Points lie in [0, 1)^dim.
Matrix sobol_unit(Eigen::Index n, Eigen::Index dim, std::uint64_t seed, Eigen::Index skip = 0);

}  // namespace stagebo
