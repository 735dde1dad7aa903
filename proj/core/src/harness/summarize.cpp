#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <regex>

#include <fmt/format.h>

#include "stagebo/harness.hpp"

namespace stagebo::harness {

namespace {

constexpr std::array<std::string_view, 6> kMetrics{"hv",           "igd", "igd_plus", "fill_distance",
                                                   "feasible_ratio", "wall_seconds"};

std::array<double, 6> values(const RunRecord& r) {
  return {r.hv, r.igd, r.igd_plus, r.fill_distance, r.feasible_ratio, r.wall_seconds};
}

}  // namespace

std::vector<SummaryRow> summarize(const std::vector<std::vector<RunRecord>>& per_seed) {
  if (per_seed.size() < 2) throw ArgumentError("summarize: need at least 2 seeds");
  const auto& grid = per_seed.front();
  for (const auto& records : per_seed) {
    bool aligned = records.size() == grid.size();
    for (std::size_t i = 0; aligned && i < records.size(); ++i) aligned = records[i].iteration == grid[i].iteration;
    if (!aligned) throw DataError("summarize: iteration grids differ across seeds");
  }

  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<SummaryRow> rows;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    SummaryRow row;
    row.iteration = grid[i].iteration;
    row.seeds = per_seed.size();
    for (std::size_t k = 0; k < kMetrics.size(); ++k) {
      std::vector<double> xs;
      for (const auto& records : per_seed) {
        const double v = values(records[i])[k];
        if (std::isfinite(v)) xs.push_back(v);
      }
      if (xs.empty()) {
        row.mean.push_back(nan);
        row.se.push_back(nan);
        continue;
      }
      const double n = static_cast<double>(xs.size());
      double mean = 0.0;
      for (double x : xs) mean += x;
      mean /= n;
      double ss = 0.0;
      for (double x : xs) ss += (x - mean) * (x - mean);
      row.mean.push_back(mean);
      row.se.push_back(xs.size() > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : nan);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SummaryRow> summarize_directory(const std::filesystem::path& out_dir) {
  if (!std::filesystem::is_directory(out_dir)) throw IoError("not a directory: " + out_dir.string());
  static const std::regex pattern(R"(seed_(\d+)\.csv)");
  std::vector<std::pair<std::uint64_t, std::filesystem::path>> files;
  for (const auto& entry : std::filesystem::directory_iterator(out_dir)) {
    std::smatch match;
    const std::string name = entry.path().filename().string();
    if (std::regex_match(name, match, pattern)) files.emplace_back(std::stoull(match[1].str()), entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<std::vector<RunRecord>> per_seed;
  for (const auto& [seed, path] : files) per_seed.push_back(read_csv(path));
  const auto rows = summarize(per_seed);

  std::string csv = "iteration,seeds";
  std::string dat = "# iteration seeds";
  for (auto m : kMetrics) {
    csv += fmt::format(",{0}_mean,{0}_se", m);
    dat += fmt::format(" {0}_mean {0}_se", m);
  }
  csv += '\n';
  dat += '\n';
  for (const auto& row : rows) {
    csv += fmt::format("{},{}", row.iteration, row.seeds);
    dat += fmt::format("{} {}", row.iteration, row.seeds);
    for (std::size_t k = 0; k < row.mean.size(); ++k) {
      csv += fmt::format(",{:.10g},{:.10g}", row.mean[k], row.se[k]);
      dat += fmt::format(" {:.10g} {:.10g}", row.mean[k], row.se[k]);
    }
    csv += '\n';
    dat += '\n';
  }
  for (const auto& [name, text] : {std::pair{"summary.csv", &csv}, std::pair{"summary.dat", &dat}}) {
    std::ofstream out(out_dir / name, std::ios::binary);
    if (!out) throw IoError("cannot write " + (out_dir / name).string());
    out << *text;
  }
  return rows;
}

}  // namespace stagebo::harness
