#include "stagebo/problems.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "stagebo/pareto.hpp"
#include "stagebo/random.hpp"

namespace stagebo::problems {

namespace {

constexpr double kPi = std::numbers::pi;

Bounds unit_bounds(std::size_t dim) { return Bounds(dim, Interval{0.0, 1.0}); }

Vector filled(std::size_t n, double value) {
  return Vector::Constant(static_cast<Eigen::Index>(n), value);
}

double zdt_g(const Vector& x) {
  const auto n = x.size();
  return 1.0 + 9.0 * x.tail(n - 1).sum() / static_cast<double>(n - 1);
}

Vector linspace01(std::size_t n) {
  return Vector::LinSpaced(static_cast<Eigen::Index>(n), 0.0, 1.0);
}

/// Picks `n` rows at evenly spaced indices (rows already ordered).
Matrix evenly_subsample(const Matrix& rows, std::size_t n) {
  const auto total = static_cast<std::size_t>(rows.rows());
  if (total <= n || n < 2) return rows;
  Matrix out(static_cast<Eigen::Index>(n), rows.cols());
  for (std::size_t i = 0; i < n; ++i) {
    const auto idx = static_cast<Eigen::Index>(
        std::llround(static_cast<double>(i) * static_cast<double>(total - 1) / static_cast<double>(n - 1)));
    out.row(static_cast<Eigen::Index>(i)) = rows.row(idx);
  }
  return out;
}

Matrix zdt_front(std::size_t n, double (*shape)(double)) {
  Matrix front(static_cast<Eigen::Index>(n), 2);
  const Vector f1 = linspace01(n);
  for (Eigen::Index i = 0; i < f1.size(); ++i) {
    front(i, 0) = -f1[i];
    front(i, 1) = -shape(f1[i]);
  }
  return front;
}

double zdt3_shape(double f1) { return 1.0 - std::sqrt(f1) - f1 * std::sin(10.0 * kPi * f1); }

Matrix zdt3_front(std::size_t n) {
  const std::size_t grid = std::max<std::size_t>(200 * n, 20001);
  Matrix dense = zdt_front(grid, &zdt3_shape);
  Matrix front = pareto::pareto_filter(dense);
  return evenly_subsample(front, n);
}

Matrix dtlz2_front(std::size_t n, std::size_t m) {
  Rng rng(0x5eed2ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix front(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (Eigen::Index i = 0; i < front.rows(); ++i) {
    Vector z(static_cast<Eigen::Index>(m));
    do {
      for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = std::abs(normal(rng));
    } while (z.norm() < 1e-12);
    front.row(i) = -(z / z.norm()).transpose();
  }
  return front;
}

double dtlz7_gain(double f) { return f * (1.0 + std::sin(3.0 * kPi * f)); }

/// Sub-intervals of [0, 1] where dtlz7_gain strictly exceeds its running
/// maximum from the left: exactly the per-coordinate Pareto-optimal values.
std::vector<Interval> dtlz7_regions() {
  constexpr int kGrid = 200000;
  std::vector<Interval> regions;
  double running = -1.0;
  bool inside = false;
  double start = 0.0;
  for (int i = 0; i <= kGrid; ++i) {
    const double f = static_cast<double>(i) / kGrid;
    const double gain = dtlz7_gain(f);
    const bool keep = gain > running;
    if (keep) running = gain;
    if (keep && !inside) {
      start = f;
      inside = true;
    } else if (!keep && inside) {
      regions.push_back({start, static_cast<double>(i - 1) / kGrid});
      inside = false;
    }
  }
  if (inside) regions.push_back({start, 1.0});
  return regions;
}

Matrix dtlz7_front(std::size_t n, std::size_t m) {
  static const std::vector<Interval> regions = dtlz7_regions();
  double total = 0.0;
  for (const auto& r : regions) total += r.span();

  Rng rng(0x5eed7ULL);
  std::uniform_real_distribution<double> unif(0.0, total);
  auto draw = [&] {
    double u = unif(rng);
    for (const auto& r : regions) {
      if (u <= r.span()) return r.lo + u;
      u -= r.span();
    }
    return regions.back().hi;
  };

  Matrix front(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (Eigen::Index i = 0; i < front.rows(); ++i) {
    double gain = 0.0;
    for (std::size_t j = 0; j + 1 < m; ++j) {
      const double f = draw();
      front(i, static_cast<Eigen::Index>(j)) = -f;
      gain += dtlz7_gain(f);
    }
    front(i, static_cast<Eigen::Index>(m - 1)) = -(2.0 * static_cast<double>(m) - gain);
  }
  return pareto::pareto_filter(front);
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

ProblemSpec make_zdt1(std::size_t dim) {
  ProblemSpec p;
  p.name = dim == 10 ? "ZDT1" : "ZDT1_D" + std::to_string(dim);
  p.dim_x = dim;
  p.dim_y = 2;
  p.bounds = unit_bounds(dim);
  p.reference_point = filled(2, -11.0);
  p.eval = [](const Vector& x) {
    const double f1 = x[0];
    const double g = zdt_g(x);
    const double f2 = g * (1.0 - std::sqrt(f1 / g));
    return Evaluation{Vector{{-f1, -f2}}, Vector()};
  };
  p.analytic_front = [](std::size_t n) {
    return zdt_front(n, [](double f1) { return 1.0 - std::sqrt(f1); });
  };
  return p;
}

ProblemSpec make_zdt2(std::size_t dim) {
  ProblemSpec p;
  p.name = dim == 8 ? "ZDT2" : "ZDT2_D" + std::to_string(dim);
  p.dim_x = dim;
  p.dim_y = 2;
  p.bounds = unit_bounds(dim);
  p.reference_point = filled(2, -11.0);
  p.eval = [](const Vector& x) {
    const double f1 = x[0];
    const double g = zdt_g(x);
    const double f2 = g * (1.0 - (f1 / g) * (f1 / g));
    return Evaluation{Vector{{-f1, -f2}}, Vector()};
  };
  p.analytic_front = [](std::size_t n) {
    return zdt_front(n, [](double f1) { return 1.0 - f1 * f1; });
  };
  return p;
}

ProblemSpec make_zdt3(std::size_t dim) {
  ProblemSpec p;
  p.name = dim == 2 ? "ZDT3" : "ZDT3_D" + std::to_string(dim);
  p.dim_x = dim;
  p.dim_y = 2;
  p.bounds = unit_bounds(dim);
  p.reference_point = filled(2, -1.0);
  p.preference = PreferenceBox::from_corners(Vector{{-0.7, -0.6}}, Vector{{-0.2, -0.4}});
  p.preference_reference_point = filled(2, -1.0);
  p.eval = [](const Vector& x) {
    const double f1 = x[0];
    const double g = zdt_g(x);
    const double r = f1 / g;
    const double f2 = g * (1.0 - std::sqrt(r) - r * std::sin(10.0 * kPi * f1));
    return Evaluation{Vector{{-f1, -f2}}, Vector()};
  };
  p.analytic_front = &zdt3_front;
  return p;
}

ProblemSpec make_dtlz2(std::size_t dim, std::size_t m) {
  ProblemSpec p;
  p.name = (dim == 6 && m == 5) ? "DTLZ2" : "DTLZ2_D" + std::to_string(dim) + "_M" + std::to_string(m);
  p.dim_x = dim;
  p.dim_y = m;
  p.bounds = unit_bounds(dim);
  p.reference_point = filled(m, -1.1);
  p.preference = PreferenceBox::from_corners(filled(m, -0.4), filled(m, -0.2));
  if (m == 5) {
    p.preference_reference_point = Vector{{-0.8442, -0.8999, -0.8358, -0.8710, -0.8553}};
  }
  p.eval = [m](const Vector& x) {
    const auto mm = static_cast<Eigen::Index>(m);
    const auto k = x.size() - mm + 1;
    const double g = (x.tail(k).array() - 0.5).square().sum();
    Vector y(mm);
    for (Eigen::Index i = 0; i < mm; ++i) {
      double f = 1.0 + g;
      for (Eigen::Index j = 0; j < mm - 1 - i; ++j) f *= std::cos(x[j] * kPi / 2.0);
      if (i > 0) f *= std::sin(x[mm - 1 - i] * kPi / 2.0);
      y[i] = -f;
    }
    return Evaluation{y, Vector()};
  };
  p.analytic_front = [m](std::size_t n) { return dtlz2_front(n, m); };
  return p;
}

ProblemSpec make_dtlz7(std::size_t dim, std::size_t m) {
  ProblemSpec p;
  p.name = (dim == 6 && m == 5) ? "DTLZ7" : "DTLZ7_D" + std::to_string(dim) + "_M" + std::to_string(m);
  p.dim_x = dim;
  p.dim_y = m;
  p.bounds = unit_bounds(dim);
  p.reference_point = filled(m, -1.1);
  p.eval = [m](const Vector& x) {
    const auto mm = static_cast<Eigen::Index>(m);
    const auto k = x.size() - mm + 1;
    const double g = 1.0 + 9.0 * x.tail(k).sum() / static_cast<double>(k);
    Vector y(mm);
    double h = static_cast<double>(m);
    for (Eigen::Index i = 0; i < mm - 1; ++i) {
      y[i] = -x[i];
      h -= x[i] / (1.0 + g) * (1.0 + std::sin(3.0 * kPi * x[i]));
    }
    y[mm - 1] = -(1.0 + g) * h;
    return Evaluation{y, Vector()};
  };
  p.analytic_front = [m](std::size_t n) { return dtlz7_front(n, m); };
  return p;
}

ProblemSpec make_mw7(std::size_t dim) {
  ProblemSpec p;
  p.name = dim == 4 ? "MW7" : "MW7_D" + std::to_string(dim);
  p.dim_x = dim;
  p.dim_y = 2;
  p.dim_c = 2;
  p.bounds = unit_bounds(dim);
  p.reference_point = filled(2, -1.2);
  p.eval = [](const Vector& x) {
    const auto n = x.size();
    double g = 1.0;
    for (Eigen::Index i = 1; i < n; ++i) {
      const double t = x[i] + (x[i - 1] - 0.5) * (x[i - 1] - 0.5) - 1.0;
      g += 2.0 * t * t;
    }
    const double f1 = x[0];
    const double f2 = g * std::sqrt(std::max(0.0, 1.0 - (f1 / g) * (f1 / g)));
    const double angle = std::atan2(f2, f1);
    const double r2 = f1 * f1 + f2 * f2;
    const double s = std::sin(4.0 * angle);
    const double outer = 1.2 + std::abs(0.4 * std::pow(s, 16));
    const double inner = 1.15 - 0.2 * std::pow(s, 8);
    // Feasible between the two radii.
    Vector c{{outer * outer - r2, r2 - inner * inner}};
    return Evaluation{Vector{{-f1, -f2}}, c};
  };
  return p;
}

ProblemSpec make_constr() {
  ProblemSpec p;
  p.name = "CONSTR";
  p.dim_x = 2;
  p.dim_y = 2;
  p.dim_c = 2;
  p.bounds = {{0.1, 1.0}, {0.0, 5.0}};
  p.reference_point = filled(2, -10.0);
  p.eval = [](const Vector& x) {
    const double f1 = x[0];
    const double f2 = (1.0 + x[1]) / x[0];
    Vector c{{x[1] + 9.0 * x[0] - 6.0, -x[1] + 9.0 * x[0] - 1.0}};
    return Evaluation{Vector{{-f1, -f2}}, c};
  };
  return p;
}

Evaluation evaluate(const ProblemSpec& problem, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != problem.dim_x) {
    throw DomainError(problem.name + ": expected input of dimension " + std::to_string(problem.dim_x));
  }
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const auto& b = problem.bounds[static_cast<std::size_t>(i)];
    if (!(x[i] >= b.lo && x[i] <= b.hi)) {
      throw DomainError(problem.name + ": input coordinate " + std::to_string(i) + " out of bounds");
    }
  }
  return problem.eval(x);
}

std::filesystem::path front_cache_path(const std::filesystem::path& cache_dir,
                                       const std::string& problem_name) {
  return cache_dir / (problem_name + "_front.csv");
}

ReferenceFront true_front(const ProblemSpec& problem, std::size_t n,
                          const std::filesystem::path& cache_dir) {
  if (n < 2) throw ArgumentError("true_front needs at least 2 points");
  if (problem.has_analytic_front()) {
    return {problem.analytic_front(n), FrontProvenance::analytic};
  }
  if (cache_dir.empty()) {
    throw UnavailableError(problem.name + ": no analytic front and no cache directory");
  }
  const auto path = front_cache_path(cache_dir, problem.name);
  if (!std::filesystem::exists(path)) {
    throw UnavailableError(problem.name + ": no cached front at " + path.string());
  }
  return {read_front_csv(path), FrontProvenance::cached_evolutionary};
}

const std::vector<ProblemSpec>& catalog() {
  static const std::vector<ProblemSpec> problems = {
      make_zdt1(10), make_zdt1(6), make_zdt2(8), make_zdt3(2),
      make_dtlz2(6, 5), make_dtlz7(6, 5), make_mw7(4), make_constr(),
  };
  return problems;
}

std::optional<ProblemSpec> find_problem(const std::string& name) {
  const std::string key = lowercase(name);
  for (const auto& p : catalog()) {
    if (lowercase(p.name) == key) return p;
  }
  return std::nullopt;
}

}  // namespace stagebo::problems
