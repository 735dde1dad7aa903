#include <cmath>
#include <random>

#include <benchmark/benchmark.h>

#include "stagebo/evo.hpp"
#include "stagebo/pareto.hpp"
#include "stagebo/surrogate.hpp"

namespace {

using stagebo::Matrix;
using stagebo::Vector;

/// Points on the positive unit sphere: mutually non-dominated.
Matrix sphere_front(Eigen::Index n, Eigen::Index m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix out(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) out(i, j) = std::abs(g(rng));
    out.row(i).normalize();
  }
  return out;
}

void BM_Hypervolume(benchmark::State& state) {
  const Matrix front = sphere_front(state.range(0), state.range(1), 1);
  const Vector ref = Vector::Zero(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(stagebo::pareto::hypervolume(front, ref));
}
BENCHMARK(BM_Hypervolume)->Args({100, 2})->Args({100, 3})->Args({50, 5})->Unit(benchmark::kMicrosecond);

void BM_GpFit(benchmark::State& state) {
  const auto n = state.range(0);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix xs(n, 6);
  Vector ys(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < 6; ++j) xs(i, j) = u(rng);
    ys[i] = std::sin(4.0 * xs(i, 0)) + xs.row(i).squaredNorm();
  }
  for (auto _ : state) benchmark::DoNotOptimize(stagebo::gp::fit(xs, ys, 3));
}
BENCHMARK(BM_GpFit)->Arg(20)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_PathEvaluation(benchmark::State& state) {
  stagebo::gp::Hyperparameters hp;
  hp.lengthscales = Vector::Constant(6, 0.3);
  const auto path = stagebo::gp::sample_prior_path(hp, 6, 512, 4);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix xs(300, 6);
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    for (Eigen::Index j = 0; j < 6; ++j) xs(i, j) = u(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(path(xs));
}
BENCHMARK(BM_PathEvaluation)->Unit(benchmark::kMicrosecond);

void BM_Nsga2(benchmark::State& state) {
  const auto fn = stagebo::evo::batched([](const Vector& x) {
    Vector y(2);
    const double g = 1.0 + 9.0 * x.tail(x.size() - 1).mean();
    y << -x[0], -g * (1.0 - std::sqrt(x[0] / g));
    return std::pair<Vector, double>{y, 0.0};
  });
  const stagebo::Bounds bounds(6, stagebo::Interval{0.0, 1.0});
  stagebo::evo::Nsga2Options o;
  o.population = static_cast<std::size_t>(state.range(0));
  o.generations = 50;
  for (auto _ : state) benchmark::DoNotOptimize(stagebo::evo::nsga2(fn, bounds, o, 6));
}
BENCHMARK(BM_Nsga2)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
