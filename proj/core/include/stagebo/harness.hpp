#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stagebo/common.hpp"
#include "stagebo/problems.hpp"
#include "stagebo/stage.hpp"

namespace stagebo::harness {

enum class Algorithm { stage, random, sobol };

struct RunConfig {
  std::string problem = "ZDT1";
  stage::Mode mode = stage::Mode::unconstrained;
  std::size_t budget = 50;
  std::vector<std::uint64_t> seeds{0};
  /// Initial design size; 2(d+1) when unset.
  std::optional<std::size_t> init;
  stage::StageConfig stage;
  Algorithm algorithm = Algorithm::stage;
  std::filesystem::path out_dir = "results";
  /// Evolutionary reference fronts are cached here; defaults to out_dir/fronts.
  std::optional<std::filesystem::path> cache_dir;
  std::size_t metrics_every = 1;
  /// When off, wall_seconds is written as 0 so outputs are byte-identical.
  bool wall_clock = true;
  bool write_json = false;
  std::size_t jobs = 1;
  /// Points sampled from analytic fronts.
  std::size_t front_points = 1000;

  std::filesystem::path resolved_cache_dir() const { return cache_dir ? *cache_dir : out_dir / "fronts"; }
};

std::string_view to_string(stage::Mode mode);
std::string_view to_string(Algorithm algorithm);
std::string_view to_string(stage::ObjectiveSchedule schedule);
std::string_view to_string(stage::TargetRule rule);
std::string_view to_string(stage::QueryRule rule);

/// Applies one `key = value` setting. Throws ConfigError on unknown keys or
/// malformed values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Parses a flat `key = value` text; `#` starts a comment.
void apply_config_text(RunConfig& config, std::string_view text);

/// Reads a config file into `config`. Throws IoError when unreadable.
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

/// Resolves the problem and checks the configuration. Throws ConfigError.
problems::ProblemSpec validate(const RunConfig& config);

/// Initial design size for `problem` under `config`.
std::size_t init_size(const RunConfig& config, const problems::ProblemSpec& problem);

struct RunRecord {
  std::uint64_t seed = 0;
  std::size_t iteration = 0;
  double hv = 0.0;
  double igd = 0.0;
  double igd_plus = 0.0;
  double fill_distance = 0.0;
  double feasible_ratio = 0.0;
  double wall_seconds = 0.0;
  std::vector<std::string> flags;
};

inline constexpr std::string_view kCsvHeader =
    "seed,iteration,hv,igd,igd_plus,fill_distance,feasible_ratio,wall_seconds,flags";

std::string to_csv(const std::vector<RunRecord>& records);
std::vector<RunRecord> parse_csv(std::string_view text);
std::string to_json(const std::vector<RunRecord>& records);

/// Writes `records` as CSV or JSON (by extension). Throws ArgumentError on
/// empty input and IoError when the file cannot be written.
void export_records(const std::vector<RunRecord>& records, const std::filesystem::path& path);
std::vector<RunRecord> read_csv(const std::filesystem::path& path);

/// Analytic front when available; otherwise a front cached under
/// `cache_dir`, generated once by NSGA-II on the true problem. A corrupt
/// cache is regenerated.
problems::ReferenceFront reference_front(const problems::ProblemSpec& problem,
                                         const std::filesystem::path& cache_dir, std::size_t points = 1000);

/// Front used for metrics in `mode` (ROI-clipped in preference mode).
Matrix metric_front(const problems::ProblemSpec& problem, stage::Mode mode, const Matrix& front);

/// Reference point used for hypervolume in `mode`.
Vector metric_reference_point(const problems::ProblemSpec& problem, stage::Mode mode);

struct SeedResult {
  std::vector<RunRecord> records;
  stage::Dataset data;
  /// Non-dominated observations (feasible ones only when constraints apply).
  Matrix front;
};

/// One seed of `config` on `problem`, measured against `reference`
/// (already clipped for the mode). Writes nothing.
SeedResult run_seed(const RunConfig& config, const problems::ProblemSpec& problem, const Matrix& reference,
                    std::uint64_t seed);

/// Validates `config`, runs every seed (in parallel up to `jobs`) and writes
/// seed_<seed>.csv, front_seed_<seed>.csv and optionally seed_<seed>.json
/// under out_dir. Returns all records ordered by seed.
std::vector<RunRecord> run(const RunConfig& config);

struct SummaryRow {
  std::size_t iteration = 0;
  std::size_t seeds = 0;
  /// Mean and standard error per metric, in CSV column order
  /// (hv, igd, igd_plus, fill_distance, feasible_ratio, wall_seconds).
  std::vector<double> mean;
  std::vector<double> se;
};

/// Mean and standard error across seeds per iteration. Throws ArgumentError
/// with fewer than 2 seeds and DataError when iteration grids differ.
std::vector<SummaryRow> summarize(const std::vector<std::vector<RunRecord>>& per_seed);

/// Reads seed_*.csv under `out_dir`, writes summary.csv and summary.dat.
std::vector<SummaryRow> summarize_directory(const std::filesystem::path& out_dir);

}  // namespace stagebo::harness
