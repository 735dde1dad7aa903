#include "stagebo/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "stagebo/random.hpp"

namespace stagebo::acq {

namespace {

constexpr double kTinyStdev = 1e-12;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

/// P(f >= t) for f ~ N(mean, stdev^2).
double upper_tail(double mean, double stdev, double t) {
  if (stdev < kTinyStdev) return mean >= t ? 1.0 : 0.0;
  return normal_cdf((mean - t) / stdev);
}

/// P(lo <= f <= hi) for f ~ N(mean, stdev^2).
double interval_probability(double mean, double stdev, double lo, double hi) {
  if (hi < lo) return 0.0;
  if (stdev < kTinyStdev) return (mean >= lo && mean <= hi) ? 1.0 : 0.0;
  return std::max(0.0, normal_cdf((hi - mean) / stdev) - normal_cdf((lo - mean) / stdev));
}

/// Probability that the constrained objectives clear their epsilons and, if
/// a preference box is present, fall in either of its bound sets. The two
/// conditions act on the same variables, so they are combined exactly.
double objective_feasibility(const EpsilonSubproblem& sub, const std::vector<double>& means,
                             const std::vector<double>& stdevs) {
  const auto& idx = sub.constrained_objectives;
  if (!sub.preference) {
    double p = 1.0;
    for (std::size_t t = 0; t < idx.size(); ++t) {
      p *= upper_tail(means[idx[t]], stdevs[idx[t]], sub.epsilons[static_cast<Eigen::Index>(t)]);
    }
    return p;
  }
  const auto& box = *sub.preference;
  double lower_set = 1.0;
  double upper_set = 1.0;
  double both = 1.0;
  for (std::size_t t = 0; t < idx.size(); ++t) {
    const std::size_t j = idx[t];
    const auto jj = static_cast<Eigen::Index>(j);
    const double eps = sub.epsilons[static_cast<Eigen::Index>(t)];
    const double lo = std::max(eps, box.lower[jj]);
    lower_set *= upper_tail(means[j], stdevs[j], lo);
    upper_set *= interval_probability(means[j], stdevs[j], eps, box.upper[jj]);
    both *= interval_probability(means[j], stdevs[j], lo, box.upper[jj]);
  }
  return std::clamp(lower_set + upper_set - both, 0.0, 1.0);
}

}  // namespace

double expected_improvement(double mean, double stdev, double incumbent) {
  const double diff = mean - incumbent;
  if (stdev < kTinyStdev) return std::max(0.0, diff);
  const double z = diff / stdev;
  return std::max(0.0, diff * normal_cdf(z) + stdev * normal_pdf(z));
}

double probability_of_feasibility(const Vector& means, const Vector& stdevs, const Vector& thresholds) {
  if (means.size() != stdevs.size() || means.size() != thresholds.size()) {
    throw ArgumentError("probability_of_feasibility: length mismatch");
  }
  double p = 1.0;
  for (Eigen::Index i = 0; i < means.size(); ++i) p *= upper_tail(means[i], stdevs[i], thresholds[i]);
  return p;
}

double augmented_value(const Vector& y, std::size_t primary, double slack) {
  const auto k = static_cast<Eigen::Index>(primary);
  return y[k] + slack * (y.sum() - y[k]);
}

bool satisfies(const EpsilonSubproblem& sub, const Vector& y, const Vector& g) {
  for (std::size_t t = 0; t < sub.constrained_objectives.size(); ++t) {
    if (y[static_cast<Eigen::Index>(sub.constrained_objectives[t])] < sub.epsilons[static_cast<Eigen::Index>(t)]) {
      return false;
    }
  }
  for (Eigen::Index l = 0; l < sub.external_thresholds.size(); ++l) {
    if (g[l] < sub.external_thresholds[l]) return false;
  }
  if (sub.preference && !sub.preference->contains(y, sub.constrained_objectives)) return false;
  return true;
}

std::optional<double> compute_incumbent(const EpsilonSubproblem& sub, const Matrix& ys, const Matrix& gs) {
  std::optional<double> best;
  for (Eigen::Index i = 0; i < ys.rows(); ++i) {
    const Vector y = ys.row(i).transpose();
    const Vector g = gs.cols() > 0 ? Vector(gs.row(i).transpose()) : Vector();
    if (!satisfies(sub, y, g)) continue;
    const double v = augmented_value(y, sub.primary, sub.slack);
    if (!best || v > *best) best = v;
  }
  return best;
}

std::vector<CeiTerms> cei_terms(const Matrix& xs, const EpsilonSubproblem& sub, const SurrogateSet& models) {
  const std::size_t m = models.objectives.size();
  const auto q = static_cast<std::size_t>(xs.rows());
  std::vector<gp::Posterior> obj;
  obj.reserve(m);
  for (const auto& model : models.objectives) obj.push_back(model.posterior(xs));
  std::vector<gp::Posterior> con;
  con.reserve(models.constraints.size());
  for (const auto& model : models.constraints) con.push_back(model.posterior(xs));

  std::vector<CeiTerms> out(q);
  std::vector<double> means(m);
  std::vector<double> stdevs(m);
  const auto k = sub.primary;
  for (std::size_t i = 0; i < q; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    double aug_mean = 0.0;
    double aug_var = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      means[j] = obj[j].mean[ii];
      stdevs[j] = std::sqrt(obj[j].variance[ii]);
      const double w = j == k ? 1.0 : sub.slack;
      aug_mean += w * means[j];
      aug_var += w * w * obj[j].variance[ii];
    }
    double pof = objective_feasibility(sub, means, stdevs);
    for (std::size_t l = 0; l < con.size(); ++l) {
      const double threshold = sub.external_thresholds.size() > static_cast<Eigen::Index>(l)
                                   ? sub.external_thresholds[static_cast<Eigen::Index>(l)]
                                   : 0.0;
      pof *= upper_tail(con[l].mean[ii], std::sqrt(con[l].variance[ii]), threshold);
    }

    CeiTerms& t = out[i];
    t.feasibility = pof;
    t.primary_mean = means[k];
    if (sub.incumbent) {
      t.expected_improvement = expected_improvement(aug_mean, std::sqrt(aug_var), *sub.incumbent);
      t.value = t.expected_improvement * pof;
    } else {
      t.expected_improvement = 0.0;
      t.value = pof;
    }
  }
  return out;
}

double cei(const Vector& x, const EpsilonSubproblem& sub, const SurrogateSet& models) {
  Matrix row(1, x.size());
  row.row(0) = x.transpose();
  return cei_terms(row, sub, models).front().value;
}

Maximizer maximize_cei(const EpsilonSubproblem& sub, const SurrogateSet& models, const Bounds& bounds,
                       std::uint64_t seed, const MaximizeOptions& options) {
  const auto d = static_cast<Eigen::Index>(bounds.size());
  const auto n_probes = static_cast<Eigen::Index>(std::max<std::size_t>(1, options.probes));
  const Matrix unit_probes = sobol_unit(n_probes, d, seed);
  const Matrix probes = scale_to_bounds(unit_probes, bounds);
  const auto terms = cei_terms(probes, sub, models);

  std::vector<std::size_t> order(terms.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return terms[a].value > terms[b].value; });

  if (!(terms[order.front()].value > 0.0)) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < terms.size(); ++i) {
      const auto& a = terms[i];
      const auto& b = terms[best];
      if (a.feasibility > b.feasibility || (a.feasibility == b.feasibility && a.primary_mean > b.primary_mean)) {
        best = i;
      }
    }
    return {probes.row(static_cast<Eigen::Index>(best)).transpose(), terms[best].value, true};
  }

  const double initial_step =
      std::clamp(0.5 * std::pow(static_cast<double>(n_probes), -1.0 / static_cast<double>(d)), 0.01, 0.25);
  Maximizer result{probes.row(static_cast<Eigen::Index>(order.front())).transpose(), terms[order.front()].value,
                   false};

  const std::size_t starts = std::min(std::max<std::size_t>(1, options.starts), order.size());
  for (std::size_t s = 0; s < starts; ++s) {
    Vector u = unit_probes.row(static_cast<Eigen::Index>(order[s])).transpose();
    double value = terms[order[s]].value;
    double step = initial_step;
    for (std::size_t it = 0; it < options.iterations && step > 1e-6; ++it) {
      Matrix polls(2 * d, d);
      for (Eigen::Index j = 0; j < d; ++j) {
        Vector up = u;
        Vector down = u;
        up[j] = std::min(1.0, u[j] + step);
        down[j] = std::max(0.0, u[j] - step);
        polls.row(2 * j) = up.transpose();
        polls.row(2 * j + 1) = down.transpose();
      }
      const auto poll_terms = cei_terms(scale_to_bounds(polls, bounds), sub, models);
      Eigen::Index best = -1;
      double best_value = value;
      for (Eigen::Index p = 0; p < polls.rows(); ++p) {
        if (poll_terms[static_cast<std::size_t>(p)].value > best_value) {
          best_value = poll_terms[static_cast<std::size_t>(p)].value;
          best = p;
        }
      }
      if (best < 0) {
        step *= 0.5;
      } else {
        u = polls.row(best).transpose();
        value = best_value;
      }
    }
    if (value > result.value) {
      Matrix row(1, d);
      row.row(0) = u.transpose();
      result.x = scale_to_bounds(row, bounds).row(0).transpose();
      result.value = value;
    }
  }
  return result;
}

}  // namespace stagebo::acq
