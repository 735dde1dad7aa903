#include "stagebo/evo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "stagebo/pareto.hpp"
#include "stagebo/random.hpp"

namespace stagebo::evo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Fronts = std::vector<std::vector<std::size_t>>;

Population evaluate(const BatchObjective& fn, Matrix xs) {
  Population pop;
  pop.individuals = std::move(xs);
  fn(pop.individuals, pop.objectives, pop.constraint_violation);
  for (Eigen::Index i = 0; i < pop.size(); ++i) {
    if (!pop.objectives.row(i).allFinite() || std::isnan(pop.constraint_violation[i])) {
      pop.objectives.row(i).setConstant(-kInf);
      pop.constraint_violation[i] = kInf;
    } else {
      pop.constraint_violation[i] = std::max(0.0, pop.constraint_violation[i]);
    }
  }
  return pop;
}

/// Deb's constraint-domination ordering: feasible fronts by Pareto rank,
/// then infeasible individuals grouped by increasing total violation.
Fronts constrained_fronts(const Population& pop) {
  std::vector<std::size_t> feasible;
  std::vector<std::size_t> infeasible;
  for (Eigen::Index i = 0; i < pop.size(); ++i) {
    (pop.feasible(i) ? feasible : infeasible).push_back(static_cast<std::size_t>(i));
  }

  Fronts fronts;
  if (!feasible.empty()) {
    Matrix objs(static_cast<Eigen::Index>(feasible.size()), pop.objectives.cols());
    for (std::size_t i = 0; i < feasible.size(); ++i) {
      objs.row(static_cast<Eigen::Index>(i)) = pop.objectives.row(static_cast<Eigen::Index>(feasible[i]));
    }
    for (auto& front : non_dominated_sort(objs)) {
      for (auto& idx : front) idx = feasible[idx];
      fronts.push_back(std::move(front));
    }
  }

  std::stable_sort(infeasible.begin(), infeasible.end(), [&](std::size_t a, std::size_t b) {
    return pop.constraint_violation[static_cast<Eigen::Index>(a)] <
           pop.constraint_violation[static_cast<Eigen::Index>(b)];
  });
  for (std::size_t i = 0; i < infeasible.size();) {
    const double v = pop.constraint_violation[static_cast<Eigen::Index>(infeasible[i])];
    std::vector<std::size_t> group;
    while (i < infeasible.size() && pop.constraint_violation[static_cast<Eigen::Index>(infeasible[i])] == v) {
      group.push_back(infeasible[i++]);
    }
    fronts.push_back(std::move(group));
  }
  return fronts;
}

void assign_rank_and_crowding(Population& pop, const Fronts& fronts) {
  pop.rank.assign(static_cast<std::size_t>(pop.size()), 0);
  pop.crowding = Vector::Zero(pop.size());
  for (std::size_t r = 0; r < fronts.size(); ++r) {
    const auto& front = fronts[r];
    Matrix objs(static_cast<Eigen::Index>(front.size()), pop.objectives.cols());
    bool finite = true;
    for (std::size_t i = 0; i < front.size(); ++i) {
      objs.row(static_cast<Eigen::Index>(i)) = pop.objectives.row(static_cast<Eigen::Index>(front[i]));
      finite = finite && objs.row(static_cast<Eigen::Index>(i)).allFinite();
    }
    const Vector crowd = finite ? crowding_distance(objs) : Vector::Zero(objs.rows());
    for (std::size_t i = 0; i < front.size(); ++i) {
      pop.rank[front[i]] = static_cast<int>(r);
      pop.crowding[static_cast<Eigen::Index>(front[i])] = crowd[static_cast<Eigen::Index>(i)];
    }
  }
}

Population select_rows(const Population& pop, const std::vector<std::size_t>& rows) {
  Population out;
  const auto n = static_cast<Eigen::Index>(rows.size());
  out.individuals.resize(n, pop.individuals.cols());
  out.objectives.resize(n, pop.objectives.cols());
  out.constraint_violation.resize(n);
  out.crowding.resize(n);
  out.rank.resize(rows.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto src = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)]);
    out.individuals.row(i) = pop.individuals.row(src);
    out.objectives.row(i) = pop.objectives.row(src);
    out.constraint_violation[i] = pop.constraint_violation[src];
    out.crowding[i] = pop.crowding.size() ? pop.crowding[src] : 0.0;
    out.rank[static_cast<std::size_t>(i)] = pop.rank.empty() ? 0 : pop.rank[static_cast<std::size_t>(src)];
  }
  return out;
}

Population merge(const Population& a, const Population& b) {
  Population out;
  out.individuals.resize(a.size() + b.size(), a.individuals.cols());
  out.individuals << a.individuals, b.individuals;
  out.objectives.resize(a.size() + b.size(), a.objectives.cols());
  out.objectives << a.objectives, b.objectives;
  out.constraint_violation.resize(a.size() + b.size());
  out.constraint_violation << a.constraint_violation, b.constraint_violation;
  return out;
}

class Variation {
 public:
  Variation(const Bounds& bounds, const Nsga2Options& options, Rng& rng)
      : bounds_(bounds), options_(options), rng_(rng) {
    const double d = static_cast<double>(bounds.size());
    mutation_rate_ = options.mutation_rate.value_or(1.0 / d);
  }

  std::size_t tournament(const Population& pop) {
    std::uniform_int_distribution<std::size_t> pick(0, static_cast<std::size_t>(pop.size()) - 1);
    const std::size_t a = pick(rng_);
    const std::size_t b = pick(rng_);
    if (pop.rank[a] != pop.rank[b]) return pop.rank[a] < pop.rank[b] ? a : b;
    const auto ia = static_cast<Eigen::Index>(a);
    const auto ib = static_cast<Eigen::Index>(b);
    if (pop.crowding[ia] != pop.crowding[ib]) return pop.crowding[ia] > pop.crowding[ib] ? a : b;
    return a;
  }

  // Simulated binary crossover, variable-wise with probability 1/2.
  void crossover(Vector& c1, Vector& c2) {
    if (unif_(rng_) > options_.crossover_rate) return;
    const double eta = options_.crossover_eta;
    for (Eigen::Index i = 0; i < c1.size(); ++i) {
      if (unif_(rng_) > 0.5) continue;
      if (std::abs(c1[i] - c2[i]) <= 1e-14) continue;
      const double lo = bounds_[static_cast<std::size_t>(i)].lo;
      const double hi = bounds_[static_cast<std::size_t>(i)].hi;
      const double y1 = std::min(c1[i], c2[i]);
      const double y2 = std::max(c1[i], c2[i]);
      const double u = unif_(rng_);

      auto spread = [&](double beta) {
        const double alpha = 2.0 - std::pow(beta, -(eta + 1.0));
        return u <= 1.0 / alpha ? std::pow(u * alpha, 1.0 / (eta + 1.0))
                                : std::pow(1.0 / (2.0 - u * alpha), 1.0 / (eta + 1.0));
      };
      const double bq1 = spread(1.0 + 2.0 * (y1 - lo) / (y2 - y1));
      const double bq2 = spread(1.0 + 2.0 * (hi - y2) / (y2 - y1));
      double v1 = std::clamp(0.5 * ((y1 + y2) - bq1 * (y2 - y1)), lo, hi);
      double v2 = std::clamp(0.5 * ((y1 + y2) + bq2 * (y2 - y1)), lo, hi);
      if (unif_(rng_) <= 0.5) std::swap(v1, v2);
      c1[i] = v1;
      c2[i] = v2;
    }
  }

  // Polynomial mutation.
  void mutate(Vector& x) {
    const double eta = options_.mutation_eta;
    const double power = 1.0 / (eta + 1.0);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (unif_(rng_) > mutation_rate_) continue;
      const double lo = bounds_[static_cast<std::size_t>(i)].lo;
      const double hi = bounds_[static_cast<std::size_t>(i)].hi;
      const double span = hi - lo;
      const double d1 = (x[i] - lo) / span;
      const double d2 = (hi - x[i]) / span;
      const double u = unif_(rng_);
      double dq = 0.0;
      if (u < 0.5) {
        const double v = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, eta + 1.0);
        dq = std::pow(v, power) - 1.0;
      } else {
        const double v = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - d2, eta + 1.0);
        dq = 1.0 - std::pow(v, power);
      }
      x[i] = std::clamp(x[i] + dq * span, lo, hi);
    }
  }

 private:
  const Bounds& bounds_;
  const Nsga2Options& options_;
  Rng& rng_;
  double mutation_rate_ = 0.1;
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
};

}  // namespace

BatchObjective batched(PointObjective fn) {
  return [fn = std::move(fn)](const Matrix& xs, Matrix& objectives, Vector& violation) {
    violation.resize(xs.rows());
    for (Eigen::Index i = 0; i < xs.rows(); ++i) {
      auto [y, v] = fn(xs.row(i).transpose());
      if (i == 0) objectives.resize(xs.rows(), y.size());
      objectives.row(i) = y.transpose();
      violation[i] = v;
    }
  };
}

std::vector<std::vector<std::size_t>> non_dominated_sort(const Matrix& points) {
  const auto n = static_cast<std::size_t>(points.rows());
  std::vector<std::vector<std::size_t>> dominated_by_me(n);
  std::vector<std::size_t> domination_count(n, 0);
  Fronts fronts(1);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      const auto ip = static_cast<Eigen::Index>(p);
      const auto iq = static_cast<Eigen::Index>(q);
      if (pareto::dominates(points.row(ip), points.row(iq))) {
        dominated_by_me[p].push_back(q);
        ++domination_count[q];
      } else if (pareto::dominates(points.row(iq), points.row(ip))) {
        dominated_by_me[q].push_back(p);
        ++domination_count[p];
      }
    }
  }
  for (std::size_t p = 0; p < n; ++p) {
    if (domination_count[p] == 0) fronts[0].push_back(p);
  }
  while (!fronts.back().empty()) {
    std::vector<std::size_t> next;
    for (std::size_t p : fronts.back()) {
      for (std::size_t q : dominated_by_me[p]) {
        if (--domination_count[q] == 0) next.push_back(q);
      }
    }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(next));
  }
  fronts.pop_back();
  return fronts;
}

Vector crowding_distance(const Matrix& front) {
  const Eigen::Index n = front.rows();
  Vector dist = Vector::Zero(n);
  if (n <= 2) {
    dist.setConstant(kInf);
    return dist;
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < front.cols(); ++j) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return front(a, j) < front(b, j); });
    const double lo = front(order.front(), j);
    const double hi = front(order.back(), j);
    dist[order.front()] = kInf;
    dist[order.back()] = kInf;
    if (!(hi > lo)) continue;
    for (std::size_t k = 1; k + 1 < order.size(); ++k) {
      dist[order[k]] += (front(order[k + 1], j) - front(order[k - 1], j)) / (hi - lo);
    }
  }
  return dist;
}

Population nsga2(const BatchObjective& fn, const Bounds& bounds, const Nsga2Options& options,
                 std::uint64_t seed) {
  if (options.population < 2 || options.population % 2 != 0) {
    throw ArgumentError("nsga2: population size must be even and >= 2");
  }
  if (options.generations < 1) throw ArgumentError("nsga2: need at least one generation");
  const auto n = static_cast<Eigen::Index>(options.population);
  const auto d = static_cast<Eigen::Index>(bounds.size());

  Rng rng(seed);
  Population parents = evaluate(fn, scale_to_bounds(uniform_unit(rng, n, d), bounds));
  assign_rank_and_crowding(parents, constrained_fronts(parents));

  Variation variation(bounds, options, rng);
  for (std::size_t gen = 0; gen < options.generations; ++gen) {
    Matrix children(n, d);
    for (Eigen::Index i = 0; i < n; i += 2) {
      Vector c1 = parents.individuals.row(static_cast<Eigen::Index>(variation.tournament(parents))).transpose();
      Vector c2 = parents.individuals.row(static_cast<Eigen::Index>(variation.tournament(parents))).transpose();
      variation.crossover(c1, c2);
      variation.mutate(c1);
      variation.mutate(c2);
      children.row(i) = c1.transpose();
      children.row(i + 1) = c2.transpose();
    }
    Population merged = merge(parents, evaluate(fn, std::move(children)));
    const Fronts fronts = constrained_fronts(merged);
    assign_rank_and_crowding(merged, fronts);

    std::vector<std::size_t> survivors;
    for (const auto& front : fronts) {
      if (survivors.size() + front.size() <= options.population) {
        survivors.insert(survivors.end(), front.begin(), front.end());
        continue;
      }
      std::vector<std::size_t> last = front;
      std::stable_sort(last.begin(), last.end(), [&](std::size_t a, std::size_t b) {
        return merged.crowding[static_cast<Eigen::Index>(a)] > merged.crowding[static_cast<Eigen::Index>(b)];
      });
      last.resize(options.population - survivors.size());
      survivors.insert(survivors.end(), last.begin(), last.end());
      break;
    }
    parents = select_rows(merged, survivors);
    if (options.on_generation) options.on_generation(gen, parents);
  }

  std::vector<std::size_t> first;
  for (Eigen::Index i = 0; i < parents.size(); ++i) {
    if (parents.rank[static_cast<std::size_t>(i)] == 0) first.push_back(static_cast<std::size_t>(i));
  }
  return select_rows(parents, first);
}

}  // namespace stagebo::evo
