#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "stagebo/acquisition.hpp"

using stagebo::Bounds;
using stagebo::Matrix;
using stagebo::PreferenceBox;
using stagebo::Vector;
using namespace stagebo::acq;
namespace gp = stagebo::gp;

namespace {

gp::Hyperparameters hp1(double ls) {
  gp::Hyperparameters hp;
  hp.lengthscales = Vector::Constant(1, ls);
  hp.signal_variance = 1.0;
  hp.noise_variance = 1e-6;
  return hp;
}

Matrix column(std::initializer_list<double> xs) {
  Matrix m(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) m(i++, 0) = x;
  return m;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

const Matrix kXs = column({0.05, 0.3, 0.55, 0.8, 0.95});

gp::GpModel model_for(const Vector& ys, double ls = 0.25) { return gp::GpModel::condition(kXs, ys, hp1(ls)); }

/// Two objectives with opposite trends on [0, 1].
SurrogateSet two_objectives() {
  SurrogateSet s;
  s.objectives.push_back(model_for(vec({0.1, 0.6, 0.9, 0.7, 0.3})));
  s.objectives.push_back(model_for(vec({0.9, 0.7, 0.4, 0.2, 0.1})));
  return s;
}

EpsilonSubproblem sub_two(double eps, std::optional<double> incumbent) {
  EpsilonSubproblem sub;
  sub.primary = 0;
  sub.slack = 1e-3;
  sub.constrained_objectives = {1};
  sub.epsilons = vec({eps});
  sub.incumbent = incumbent;
  return sub;
}

}  // namespace

TEST(ExpectedImprovement, ClosedFormValues) {
  EXPECT_NEAR(expected_improvement(1.0, 0.0, 1.0), 0.0, 1e-15);
  EXPECT_NEAR(expected_improvement(1.0, 1e-14, 1.0), 0.0, 1e-15);
  EXPECT_NEAR(expected_improvement(2.0, 1.0, 2.0), 0.3989422804014327, 1e-12);
  EXPECT_NEAR(expected_improvement(3.0, 1.0, 2.0), 1.0833154705876864, 1e-12);
  EXPECT_NEAR(expected_improvement(3.0, 1.0, 2.0), oracle::phi_cdf(1.0) + oracle::phi_pdf(1.0), 1e-12);
}

TEST(ExpectedImprovement, MonotoneAndNonNegative) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_real_distribution<double> s(0.01, 3.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double mu = u(rng);
    const double sd = s(rng);
    const double best = u(rng);
    const double ei = expected_improvement(mu, sd, best);
    EXPECT_GE(ei, 0.0);
    EXPECT_GE(expected_improvement(mu + 0.1, sd, best), ei);
    if (mu <= best) {
      EXPECT_GE(expected_improvement(mu, sd + 0.1, best), ei);
    }
  }
}

TEST(ExpectedImprovement, DerivativeInMeanIsNormalCdf) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> s(0.2, 2.0);
  const double h = 1e-6;
  for (int trial = 0; trial < 200; ++trial) {
    const double mu = u(rng);
    const double sd = s(rng);
    const double best = u(rng);
    const double fd = (expected_improvement(mu + h, sd, best) - expected_improvement(mu - h, sd, best)) / (2.0 * h);
    EXPECT_NEAR(fd, oracle::phi_cdf((mu - best) / sd), 1e-5);
  }
}

TEST(ProbabilityOfFeasibility, ClosedFormValues) {
  EXPECT_DOUBLE_EQ(probability_of_feasibility(Vector(0), Vector(0), Vector(0)), 1.0);
  EXPECT_DOUBLE_EQ(probability_of_feasibility(vec({0.3}), vec({1.0}), vec({0.3})), 0.5);
  EXPECT_NEAR(probability_of_feasibility(vec({2.0}), vec({1.0}), vec({0.0})), 0.9772498680518208, 1e-12);
  EXPECT_THROW(probability_of_feasibility(vec({1.0}), vec({1.0, 1.0}), vec({0.0})), stagebo::ArgumentError);
}

TEST(ProbabilityOfFeasibility, InUnitIntervalAndAlwaysSatisfiedIsNeutral) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Vector mu = vec({n(rng), n(rng)});
    const Vector sd = vec({0.5 + std::abs(n(rng)), 0.5 + std::abs(n(rng))});
    const Vector th = vec({n(rng), n(rng)});
    const double p = probability_of_feasibility(mu, sd, th);
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
    const double extra = probability_of_feasibility(vec({mu[0], mu[1], 10.0}), vec({sd[0], sd[1], 1.0}),
                                                    vec({th[0], th[1], 0.0}));
    if (p > 0.0) {
      EXPECT_LT(std::abs(extra - p) / p, 1e-6);
    }
  }
}

TEST(Incumbent, OnlyOverSatisfyingObservations) {
  const EpsilonSubproblem sub = sub_two(0.5, std::nullopt);
  const Matrix ys{{1.0, 0.4}, {0.7, 0.6}, {0.2, 0.9}};
  const auto inc = compute_incumbent(sub, ys, Matrix(3, 0));
  ASSERT_TRUE(inc.has_value());
  EXPECT_DOUBLE_EQ(*inc, 0.7 + 1e-3 * 0.6);
  EXPECT_FALSE(compute_incumbent(sub_two(5.0, std::nullopt), ys, Matrix(3, 0)).has_value());
}

TEST(Incumbent, ExternalConstraintsFilter) {
  EpsilonSubproblem sub = sub_two(0.0, std::nullopt);
  sub.external_thresholds = Vector::Zero(1);
  const Matrix ys{{1.0, 0.4}, {0.7, 0.6}};
  const Matrix gs{{-0.1}, {0.0}};
  EXPECT_DOUBLE_EQ(*compute_incumbent(sub, ys, gs), 0.7 + 1e-3 * 0.6);
}

TEST(Cei, NoIncumbentReturnsFeasibility) {
  const auto models = two_objectives();
  const auto sub = sub_two(0.5, std::nullopt);
  const Vector x = vec({0.4});
  const auto [m1, v1] = models.objectives[1].posterior(x);
  EXPECT_NEAR(cei(x, sub, models), oracle::phi_cdf((m1 - 0.5) / std::sqrt(v1)), 1e-12);
}

TEST(Cei, NegligibleThresholdsReduceToExpectedImprovement) {
  const auto models = two_objectives();
  const auto sub = sub_two(-1e6, 0.8);
  for (double xv : {0.0, 0.2, 0.45, 0.7, 1.0}) {
    const Vector x = vec({xv});
    const auto [m0, v0] = models.objectives[0].posterior(x);
    const auto [m1, v1] = models.objectives[1].posterior(x);
    const double plain = expected_improvement(m0 + 1e-3 * m1, std::sqrt(v0 + 1e-6 * v1), 0.8);
    EXPECT_NEAR(cei(x, sub, models), plain, 1e-9);
  }
}

TEST(Cei, ComposesClosedFormOracles) {
  const auto models = two_objectives();
  const auto sub = sub_two(0.45, 0.75);
  for (double xv : {0.1, 0.35, 0.5, 0.62, 0.9}) {
    const Vector x = vec({xv});
    const auto [m0, v0] = models.objectives[0].posterior(x);
    const auto [m1, v1] = models.objectives[1].posterior(x);
    const double mu = m0 + 1e-3 * m1;
    const double sd = std::sqrt(v0 + 1e-6 * v1);
    const double z = (mu - 0.75) / sd;
    const double ei = (mu - 0.75) * oracle::phi_cdf(z) + sd * oracle::phi_pdf(z);
    const double pof = oracle::phi_cdf((m1 - 0.45) / std::sqrt(v1));
    EXPECT_NEAR(cei(x, sub, models), std::max(0.0, ei) * pof, 1e-9);
  }
}

TEST(Cei, ExternalConstraintMultipliesFeasibility) {
  auto models = two_objectives();
  models.constraints.push_back(model_for(vec({-0.5, -0.1, 0.2, 0.4, 0.6})));
  auto sub = sub_two(0.3, 0.7);
  sub.external_thresholds = Vector::Zero(1);
  const Vector x = vec({0.5});
  const auto [mg, vg] = models.constraints[0].posterior(x);
  const double with = cei(x, sub, models);
  models.constraints.clear();
  sub.external_thresholds = Vector(0);
  EXPECT_NEAR(with, cei(x, sub, models) * oracle::phi_cdf(mg / std::sqrt(vg)), 1e-12);
}

TEST(Cei, PreferenceFeasibilityMatchesMonteCarlo) {
  SurrogateSet models;
  models.objectives.push_back(model_for(vec({0.1, 0.6, 0.9, 0.7, 0.3})));
  models.objectives.push_back(model_for(vec({0.9, 0.7, 0.4, 0.2, 0.1}), 0.15));
  models.objectives.push_back(model_for(vec({0.2, 0.5, 0.6, 0.5, 0.2}), 0.15));
  EpsilonSubproblem sub;
  sub.primary = 0;
  sub.constrained_objectives = {1, 2};
  sub.epsilons = vec({0.2, 0.3});
  sub.preference = PreferenceBox{vec({0.0, 0.35, 0.4}), vec({1.0, 0.6, 0.55})};

  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 1.0);
  for (double xv : {0.17, 0.42, 0.68}) {
    const Vector x = vec({xv});
    const auto [m1, v1] = models.objectives[1].posterior(x);
    const auto [m2, v2] = models.objectives[2].posterior(x);
    const int samples = 400'000;
    int hits = 0;
    for (int s = 0; s < samples; ++s) {
      const Vector y = vec({0.0, m1 + std::sqrt(v1) * n(rng), m2 + std::sqrt(v2) * n(rng)});
      const bool eps_ok = y[1] >= 0.2 && y[2] >= 0.3;
      const bool lower_ok = y[1] >= 0.35 && y[2] >= 0.4;
      const bool upper_ok = y[1] <= 0.6 && y[2] <= 0.55;
      hits += eps_ok && (lower_ok || upper_ok);
    }
    EXPECT_NEAR(cei(x, sub, models), static_cast<double>(hits) / samples, 5e-3) << "x=" << xv;
  }
}

TEST(MaximizeCei, MatchesDenseGrid) {
  SurrogateSet models;
  models.objectives.push_back(model_for(vec({0.1, 0.5, 0.8, 0.55, 0.15})));
  EpsilonSubproblem sub;
  sub.primary = 0;
  sub.epsilons = Vector(0);
  sub.incumbent = 0.8;
  const Bounds bounds{{0.0, 1.0}};
  const auto best = maximize_cei(sub, models, bounds, 4);
  ASSERT_FALSE(best.fallback);

  const int grid = 10'000;
  Matrix xs(grid, 1);
  for (int i = 0; i < grid; ++i) xs(i, 0) = static_cast<double>(i) / (grid - 1);
  const auto terms = cei_terms(xs, sub, models);
  int arg = 0;
  for (int i = 1; i < grid; ++i) {
    if (terms[static_cast<std::size_t>(i)].value > terms[static_cast<std::size_t>(arg)].value) arg = i;
  }
  EXPECT_NEAR(best.x[0], xs(arg, 0), 1e-2);
  EXPECT_GE(best.value, terms[static_cast<std::size_t>(arg)].value * (1.0 - 1e-6));
}

TEST(MaximizeCei, DeterministicAndInBounds) {
  const auto models = two_objectives();
  const auto sub = sub_two(0.4, 0.7);
  const Bounds bounds{{0.0, 1.0}};
  const auto a = maximize_cei(sub, models, bounds, 17);
  const auto b = maximize_cei(sub, models, bounds, 17);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.value, b.value);
  EXPECT_GE(a.x[0], 0.0);
  EXPECT_LE(a.x[0], 1.0);
}

TEST(MaximizeCei, InfeasibleEverywhereFallsBack) {
  const auto models = two_objectives();
  const auto sub = sub_two(1e6, std::nullopt);
  const Bounds bounds{{0.0, 1.0}};
  const auto r = maximize_cei(sub, models, bounds, 3);
  EXPECT_TRUE(r.fallback);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_GE(r.x[0], 0.0);
  EXPECT_LE(r.x[0], 1.0);
}

TEST(MaximizeCei, ArgmaxInvariantUnderPowerOfTwoScaling) {
  const Vector y0 = vec({0.1, 0.6, 0.9, 0.7, 0.3});
  const Vector y1 = vec({0.9, 0.7, 0.4, 0.2, 0.1});
  SurrogateSet a;
  a.objectives = {model_for(y0), model_for(y1)};
  SurrogateSet b;
  b.objectives = {model_for(4.0 * y0), model_for(4.0 * y1)};
  const Bounds bounds{{0.0, 1.0}};
  const auto ra = maximize_cei(sub_two(0.3, 0.85), a, bounds, 8);
  const auto rb = maximize_cei(sub_two(1.2, 3.4), b, bounds, 8);
  EXPECT_EQ(ra.x, rb.x);
}
