#include "stagebo/evo.hpp"
#include "stagebo/harness.hpp"
#include "stagebo/pareto.hpp"
#include "stagebo/random.hpp"

namespace stagebo::harness {

namespace {

constexpr std::size_t kFrontPopulation = 500;
constexpr std::size_t kFrontGenerations = 500;
constexpr std::uint64_t kFrontSeed = 0x5eed;

Matrix generate_front(const problems::ProblemSpec& problem) {
  evo::BatchObjective fn = [&](const Matrix& xs, Matrix& objs, Vector& violation) {
    objs.resize(xs.rows(), static_cast<Eigen::Index>(problem.dim_y));
    violation.resize(xs.rows());
    for (Eigen::Index i = 0; i < xs.rows(); ++i) {
      const auto e = problems::evaluate(problem, xs.row(i).transpose());
      objs.row(i) = e.y.transpose();
      violation[i] = (-e.g.array()).max(0.0).sum();
    }
  };
  evo::Nsga2Options options;
  options.population = kFrontPopulation;
  options.generations = kFrontGenerations;
  const auto pop = evo::nsga2(fn, problem.bounds, options, derive_seed(kFrontSeed, problem.dim_x));
  std::vector<Vector> feasible;
  for (Eigen::Index i = 0; i < pop.size(); ++i) {
    if (pop.feasible(i)) feasible.push_back(pop.objectives.row(i).transpose());
  }
  if (feasible.empty()) throw NumericalError("no feasible point found for the reference front of " + problem.name);
  return pareto::pareto_filter(stack_rows(feasible, static_cast<Eigen::Index>(problem.dim_y)));
}

}  // namespace

problems::ReferenceFront reference_front(const problems::ProblemSpec& problem,
                                         const std::filesystem::path& cache_dir, std::size_t points) {
  if (problem.has_analytic_front()) return problems::true_front(problem, points);
  const auto path = problems::front_cache_path(cache_dir, problem.name);
  if (std::filesystem::exists(path)) {
    try {
      Matrix cached = read_front_csv(path);
      if (static_cast<std::size_t>(cached.cols()) == problem.dim_y && cached.allFinite()) {
        return {std::move(cached), problems::FrontProvenance::cached_evolutionary};
      }
    } catch (const DataError&) {
      // Corrupt cache: regenerate below.
    }
  }
  Matrix front = generate_front(problem);
  write_front_csv(path, front);
  return {read_front_csv(path), problems::FrontProvenance::cached_evolutionary};
}

Matrix metric_front(const problems::ProblemSpec& problem, stage::Mode mode, const Matrix& front) {
  if (mode != stage::Mode::preference || !problem.preference) return front;
  Matrix clipped = clip_to_region(front, *problem.preference);
  if (clipped.rows() == 0) throw ConfigError("preference region of " + problem.name + " misses the reference front");
  return clipped;
}

Vector metric_reference_point(const problems::ProblemSpec& problem, stage::Mode mode) {
  if (mode == stage::Mode::preference && problem.preference_reference_point) {
    return *problem.preference_reference_point;
  }
  return problem.reference_point;
}

}  // namespace stagebo::harness
