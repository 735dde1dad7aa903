#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stagebo/common.hpp"
#include "stagebo/preference.hpp"

namespace stagebo::problems {

/// Objective values `y` (maximized) and constraint values `g` (feasible iff all >= 0).
struct Evaluation {
  Vector y;
  Vector g;
};

/// A benchmark problem in maximization form.
///
/// Classical minimization benchmarks are negated once, inside `eval`, so
/// every consumer can treat larger objective values as better.
struct ProblemSpec {
  std::string name;
  std::size_t dim_x = 0;
  std::size_t dim_y = 0;
  std::size_t dim_c = 0;
  Bounds bounds;
  Vector reference_point;
  std::optional<PreferenceBox> preference;
  /// Hypervolume reference point used for preference-mode runs.
  std::optional<Vector> preference_reference_point;
  /// Raw evaluation; callers go through `evaluate()` for bound checks.
  std::function<Evaluation(const Vector&)> eval;
  /// Closed-form front sampler (n points, maximization form). Empty when the
  /// problem has no analytic front.
  std::function<Matrix(std::size_t)> analytic_front;

  bool constrained() const { return dim_c > 0; }
  bool has_analytic_front() const { return static_cast<bool>(analytic_front); }
};

enum class FrontProvenance { analytic, cached_evolutionary };

struct ReferenceFront {
  Matrix points;
  FrontProvenance provenance = FrontProvenance::analytic;
};

/// Evaluates `problem` at `x`; throws DomainError when `x` leaves the bounds.
Evaluation evaluate(const ProblemSpec& problem, const Vector& x);

/// Where the evolutionary reference front for `problem_name` is cached.
std::filesystem::path front_cache_path(const std::filesystem::path& cache_dir,
                                       const std::string& problem_name);

/// Reference front with `n` points for analytic problems; for the rest, the
/// cached front under `cache_dir`. Throws UnavailableError when neither exists.
ReferenceFront true_front(const ProblemSpec& problem, std::size_t n,
                          const std::filesystem::path& cache_dir = {});

/// Registered benchmark problems.
const std::vector<ProblemSpec>& catalog();

/// Case-insensitive lookup in the catalog.
std::optional<ProblemSpec> find_problem(const std::string& name);

/// Builders, exposed for tests and custom registrations.
ProblemSpec make_zdt1(std::size_t dim);
ProblemSpec make_zdt2(std::size_t dim);
ProblemSpec make_zdt3(std::size_t dim);
ProblemSpec make_dtlz2(std::size_t dim, std::size_t objectives);
ProblemSpec make_dtlz7(std::size_t dim, std::size_t objectives);
ProblemSpec make_mw7(std::size_t dim);
ProblemSpec make_constr();

}  // namespace stagebo::problems

namespace stagebo {

/// Reads a front CSV: header `f1,...,fm`, then one point per row.
Matrix read_front_csv(const std::filesystem::path& path);
/// Writes a front CSV with round-trip precision.
void write_front_csv(const std::filesystem::path& path, const Matrix& points);

}  // namespace stagebo
