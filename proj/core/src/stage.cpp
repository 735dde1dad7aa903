#include "stagebo/stage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "stagebo/pareto.hpp"

namespace stagebo::stage {

namespace {

// Stream tags for per-iteration seeds.
constexpr std::uint64_t kInitStream = 0x1a1a;
constexpr std::uint64_t kFitStream = 1;
constexpr std::uint64_t kFrontStream = 2;
constexpr std::uint64_t kAcqStream = 3;
constexpr std::uint64_t kScheduleStream = 4;

Matrix rows_of(const Matrix& m, const std::vector<bool>& mask) {
  Eigen::Index n = 0;
  for (bool b : mask) n += b ? 1 : 0;
  Matrix out(n, m.cols());
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (mask[static_cast<std::size_t>(i)]) out.row(r++) = m.row(i);
  }
  return out;
}

Vector clamp_to_bounds(Vector x, const Bounds& bounds) {
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const auto& b = bounds[static_cast<std::size_t>(j)];
    x[j] = std::clamp(x[j], b.lo, b.hi);
  }
  return x;
}

std::size_t nearest_row(const Matrix& points, const Vector& target) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const double d = (points.row(i).transpose() - target).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::size_t>(i);
    }
  }
  return best;
}

}  // namespace

void Dataset::append(const Vector& xi, const problems::Evaluation& e) {
  const Eigen::Index n = size();
  if (n == 0) {
    x.resize(0, xi.size());
    y.resize(0, e.y.size());
    g.resize(0, e.g.size());
  }
  x.conservativeResize(n + 1, Eigen::NoChange);
  y.conservativeResize(n + 1, Eigen::NoChange);
  g.conservativeResize(n + 1, Eigen::NoChange);
  x.row(n) = xi.transpose();
  y.row(n) = e.y.transpose();
  if (e.g.size() > 0) g.row(n) = e.g.transpose();
}

std::vector<bool> Dataset::feasible_mask() const {
  std::vector<bool> mask(static_cast<std::size_t>(size()), true);
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    mask[static_cast<std::size_t>(i)] = g.cols() == 0 || (g.row(i).array() >= 0.0).all();
  }
  return mask;
}

Matrix initial_design(const problems::ProblemSpec& problem, std::uint64_t seed, std::size_t init) {
  const auto d = static_cast<Eigen::Index>(problem.dim_x);
  Matrix design =
      scale_to_bounds(sobol_unit(static_cast<Eigen::Index>(init), d, derive_seed(seed, kInitStream)), problem.bounds);
  for (Eigen::Index i = 0; i < design.rows(); ++i) {
    design.row(i) = clamp_to_bounds(design.row(i).transpose(), problem.bounds).transpose();
  }
  return design;
}

LoopState initialize(const problems::ProblemSpec& problem, Mode mode, const StageConfig& config,
                     std::uint64_t seed, std::size_t init) {
  if (init < 2) throw ArgumentError("initialize: need at least 2 initial points");
  if (mode == Mode::unconstrained && problem.constrained()) {
    throw ConfigError("problem " + problem.name + " has constraints; use constrained mode");
  }
  if (mode == Mode::constrained && !problem.constrained()) {
    throw ConfigError("problem " + problem.name + " has no constraints");
  }
  if (mode == Mode::preference && !problem.preference) {
    throw ConfigError("problem " + problem.name + " has no preference region");
  }
  LoopState state;
  state.problem = problem;
  state.mode = mode;
  state.config = config;
  state.seed = seed;
  const Matrix design = initial_design(problem, seed, init);
  for (Eigen::Index i = 0; i < design.rows(); ++i) {
    const Vector xi = design.row(i).transpose();
    state.data.append(xi, problems::evaluate(problem, xi));
  }
  refit(state);
  return state;
}

void refit(LoopState& state) {
  const auto& data = state.data;
  const std::size_t m = state.problem.dim_y;
  const std::size_t c = state.uses_constraints() ? state.problem.dim_c : 0;
  acq::SurrogateSet next;
  for (std::size_t o = 0; o < m + c; ++o) {
    gp::FitOptions options;
    options.input_bounds = state.problem.bounds;
    options.restarts = state.config.gp_restarts;
    options.max_iterations = state.config.gp_max_iterations;
    const bool is_obj = o < m;
    const auto& previous = is_obj ? state.models.objectives : state.models.constraints;
    const std::size_t idx = is_obj ? o : o - m;
    if (idx < previous.size()) options.warm_start = previous[idx].hyperparameters();
    const Vector ys = is_obj ? Vector(data.y.col(static_cast<Eigen::Index>(idx)))
                             : Vector(data.g.col(static_cast<Eigen::Index>(idx)));
    auto model = gp::fit(data.x, ys, derive_seed(state.seed, state.iteration, kFitStream + 16 * o), options);
    (is_obj ? next.objectives : next.constraints).push_back(std::move(model));
  }
  state.models = std::move(next);
}

SampledFront solve_front(const evo::BatchObjective& fn, const Bounds& bounds, const StageConfig& config,
                         std::uint64_t seed) {
  evo::Nsga2Options options;
  options.population = config.nsga_population;
  options.generations = config.nsga_generations;
  const auto pop = evo::nsga2(fn, bounds, options, seed);
  SampledFront out;
  out.objectives = pop.objectives;
  out.inputs = pop.individuals;
  out.fallback = pop.size() > 0 && !pop.feasible(0);
  return out;
}

SampledFront sampled_front(const LoopState& state, std::uint64_t seed) {
  if (state.data.size() < 2) throw ArgumentError("sampled_front: need at least 2 observations");
  const auto features = state.config.rff_features;
  std::vector<gp::SampledPath> objective_paths;
  std::vector<gp::SampledPath> constraint_paths;
  for (std::size_t j = 0; j < state.models.objectives.size(); ++j) {
    objective_paths.push_back(gp::sample_path(state.models.objectives[j], features, derive_seed(seed, j)));
  }
  for (std::size_t l = 0; l < state.models.constraints.size(); ++l) {
    constraint_paths.push_back(
        gp::sample_path(state.models.constraints[l], features, derive_seed(seed, 1000 + l)));
  }
  const std::optional<PreferenceBox> box =
      state.mode == Mode::preference ? state.preference() : std::optional<PreferenceBox>{};

  evo::BatchObjective fn = [&](const Matrix& xs, Matrix& objs, Vector& violation) {
    objs.resize(xs.rows(), static_cast<Eigen::Index>(objective_paths.size()));
    for (std::size_t j = 0; j < objective_paths.size(); ++j) {
      objs.col(static_cast<Eigen::Index>(j)) = objective_paths[j](xs);
    }
    violation = Vector::Zero(xs.rows());
    for (const auto& path : constraint_paths) violation += (-path(xs)).cwiseMax(0.0);
    if (box) {
      for (Eigen::Index i = 0; i < xs.rows(); ++i) violation[i] += box->violation(objs.row(i).transpose());
    }
  };
  return solve_front(fn, state.problem.bounds, state.config, seed);
}

std::size_t select_target(const Matrix& front, const Matrix& observations, bool normalize) {
  if (front.rows() == 0 || observations.rows() == 0) throw ArgumentError("select_target: empty point set");
  if (front.cols() != observations.cols()) throw ArgumentError("select_target: dimension mismatch");
  Vector lo = front.colwise().minCoeff().transpose().cwiseMin(observations.colwise().minCoeff().transpose());
  Vector scale = Vector::Ones(front.cols());
  if (normalize) {
    const Vector hi =
        front.colwise().maxCoeff().transpose().cwiseMax(observations.colwise().maxCoeff().transpose());
    for (Eigen::Index j = 0; j < scale.size(); ++j) {
      const double span = hi[j] - lo[j];
      scale[j] = span > 0.0 ? 1.0 / span : 1.0;
    }
  }
  std::size_t best = 0;
  double best_d = -1.0;
  for (Eigen::Index i = 0; i < front.rows(); ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < observations.rows(); ++t) {
      const double d = ((front.row(i) - observations.row(t)).transpose().cwiseProduct(scale)).squaredNorm();
      nearest = std::min(nearest, d);
    }
    if (nearest > best_d) {
      best_d = nearest;
      best = static_cast<std::size_t>(i);
    }
  }
  return best;
}

std::size_t select_objective(std::size_t t, std::size_t m, ObjectiveSchedule schedule, Rng& rng,
                             const Vector* target, const Matrix* observations) {
  if (m < 2) throw ArgumentError("select_objective: need at least 2 objectives");
  switch (schedule) {
    case ObjectiveSchedule::round_robin:
      return t % m;
    case ObjectiveSchedule::random:
      return std::uniform_int_distribution<std::size_t>(0, m - 1)(rng);
    case ObjectiveSchedule::feasible: {
      if (target == nullptr || observations == nullptr || observations->rows() == 0) {
        throw ArgumentError("select_objective: feasible schedule needs a target and observations");
      }
      std::size_t best = 0;
      double best_gap = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < m; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        const double gap = (observations->col(jj).array() - (*target)[jj]).abs().minCoeff();
        if (gap < best_gap) {
          best_gap = gap;
          best = j;
        }
      }
      return best;
    }
  }
  return t % m;
}

Vector lexicographic_target(const Matrix& observations, Rng& rng) {
  if (observations.rows() == 0) throw ArgumentError("lexicographic_target: no observations");
  Matrix valid = pareto::pareto_filter(observations);
  Vector target(observations.cols());
  for (Eigen::Index j = 0; j < observations.cols(); ++j) {
    const double lo = valid.col(j).minCoeff();
    const double hi = valid.col(j).maxCoeff();
    target[j] = lo < hi ? std::uniform_real_distribution<double>(lo, hi)(rng) : lo;
    std::vector<bool> keep(static_cast<std::size_t>(valid.rows()));
    for (Eigen::Index i = 0; i < valid.rows(); ++i) keep[static_cast<std::size_t>(i)] = valid(i, j) >= target[j];
    valid = rows_of(valid, keep);
  }
  return target;
}

acq::EpsilonSubproblem build_subproblem(const Vector& target, const Matrix& observations, std::size_t k,
                                        const StageConfig& config, std::size_t num_constraints,
                                        const std::optional<PreferenceBox>& preference) {
  const auto m = static_cast<std::size_t>(target.size());
  if (observations.rows() == 0 || static_cast<std::size_t>(observations.cols()) != m || k >= m) {
    throw ArgumentError("build_subproblem: inconsistent target, observations or primary index");
  }
  acq::EpsilonSubproblem sub;
  sub.primary = k;
  sub.slack = config.slack;
  sub.epsilons.resize(static_cast<Eigen::Index>(m - 1));
  Eigen::Index t = 0;
  for (std::size_t j = 0; j < m; ++j) {
    if (j == k) continue;
    const auto jj = static_cast<Eigen::Index>(j);
    sub.constrained_objectives.push_back(j);
    sub.epsilons[t++] = std::min(target[jj], observations.col(jj).maxCoeff());
  }
  sub.external_thresholds = Vector::Zero(static_cast<Eigen::Index>(num_constraints));
  sub.preference = preference;
  return sub;
}

StepResult step(LoopState& state) {
  const std::size_t t = state.iteration;
  const auto& cfg = state.config;
  const std::size_t m = state.problem.dim_y;
  StepResult result;

  const SampledFront front = sampled_front(state, derive_seed(state.seed, t, kFrontStream));
  if (front.fallback) result.flags.emplace_back("front_fallback");

  Matrix observed = state.data.y;
  if (state.uses_constraints()) {
    const auto mask = state.data.feasible_mask();
    if (std::find(mask.begin(), mask.end(), true) != mask.end()) observed = rows_of(state.data.y, mask);
  }

  Rng rng(derive_seed(state.seed, t, kScheduleStream));
  std::size_t carrier = 0;
  if (cfg.target_rule == TargetRule::maxmin) {
    carrier = select_target(front.objectives, observed, cfg.normalize_objectives);
    result.target = front.objectives.row(static_cast<Eigen::Index>(carrier)).transpose();
  } else {
    result.target = lexicographic_target(observed, rng);
    carrier = nearest_row(front.objectives, result.target);
  }
  if (state.mode == Mode::preference && !state.preference()->contains(result.target)) {
    result.flags.emplace_back("target_outside_roi");
  }

  result.primary = select_objective(t, m, cfg.objective_schedule, rng, &result.target, &observed);
  const std::size_t num_constraints = state.uses_constraints() ? state.problem.dim_c : 0;
  auto sub = build_subproblem(result.target, observed, result.primary, cfg, num_constraints,
                              state.mode == Mode::preference ? state.preference() : std::nullopt);
  const Matrix gs = num_constraints > 0 ? state.data.g : Matrix(state.data.size(), 0);
  sub.incumbent = acq::compute_incumbent(sub, state.data.y, gs);

  if (cfg.query_rule == QueryRule::direct_sample) {
    result.x = front.inputs.row(static_cast<Eigen::Index>(carrier)).transpose();
  } else {
    acq::MaximizeOptions options;
    options.starts = cfg.cei_starts;
    const auto best = acq::maximize_cei(sub, state.models, state.problem.bounds,
                                        derive_seed(state.seed, t, kAcqStream), options);
    if (best.fallback) result.flags.emplace_back("acq_fallback");
    result.x = best.x;
  }
  result.x = clamp_to_bounds(result.x, state.problem.bounds);

  state.data.append(result.x, problems::evaluate(state.problem, result.x));
  state.iteration = t + 1;
  refit(state);
  return result;
}

}  // namespace stagebo::stage
