#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "stagebo/harness.hpp"

namespace stagebo::harness {

namespace {

std::string format_float(double v) { return fmt::format("{:.10g}", v); }

double round_to_10(double v) {
  if (!std::isfinite(v)) return v;
  return std::strtod(format_float(v).c_str(), nullptr);
}

std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (i) out += ';';
    out += flags[i];
  }
  return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    parts.emplace_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return parts;
}

double parse_double(const std::string& cell, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (cell.empty() || end != cell.c_str() + cell.size()) {
    throw DataError(fmt::format("line {}: bad number '{}'", line, cell));
  }
  return v;
}

std::uint64_t parse_unsigned(const std::string& cell, std::size_t line) {
  char* end = nullptr;
  const auto v = std::strtoull(cell.c_str(), &end, 10);
  if (cell.empty() || end != cell.c_str() + cell.size()) {
    throw DataError(fmt::format("line {}: bad integer '{}'", line, cell));
  }
  return v;
}

}  // namespace

std::string to_csv(const std::vector<RunRecord>& records) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : records) {
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", r.seed, r.iteration, format_float(r.hv), format_float(r.igd),
                       format_float(r.igd_plus), format_float(r.fill_distance), format_float(r.feasible_ratio),
                       format_float(r.wall_seconds), join_flags(r.flags));
  }
  return out;
}

std::vector<RunRecord> parse_csv(std::string_view text) {
  const auto lines = split(text, '\n');
  if (lines.empty() || lines.front() != kCsvHeader) throw DataError("missing or unexpected CSV header");
  std::vector<RunRecord> records;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& line = lines[i];
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 9) throw DataError(fmt::format("line {}: expected 9 fields", i + 1));
    RunRecord r;
    r.seed = parse_unsigned(cells[0], i + 1);
    r.iteration = parse_unsigned(cells[1], i + 1);
    r.hv = parse_double(cells[2], i + 1);
    r.igd = parse_double(cells[3], i + 1);
    r.igd_plus = parse_double(cells[4], i + 1);
    r.fill_distance = parse_double(cells[5], i + 1);
    r.feasible_ratio = parse_double(cells[6], i + 1);
    r.wall_seconds = parse_double(cells[7], i + 1);
    if (!cells[8].empty()) r.flags = split(cells[8], ';');
    records.push_back(std::move(r));
  }
  return records;
}

std::string to_json(const std::vector<RunRecord>& records) {
  auto number = [](double v) -> nlohmann::json {
    if (!std::isfinite(v)) return nullptr;
    return round_to_10(v);
  };
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) {
    arr.push_back({{"seed", r.seed},
                   {"iteration", r.iteration},
                   {"hv", number(r.hv)},
                   {"igd", number(r.igd)},
                   {"igd_plus", number(r.igd_plus)},
                   {"fill_distance", number(r.fill_distance)},
                   {"feasible_ratio", number(r.feasible_ratio)},
                   {"wall_seconds", number(r.wall_seconds)},
                   {"flags", join_flags(r.flags)}});
  }
  return arr.dump(2) + "\n";
}

void export_records(const std::vector<RunRecord>& records, const std::filesystem::path& path) {
  if (records.empty()) throw ArgumentError("export_records: no records");
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << (path.extension() == ".json" ? to_json(records) : to_csv(records));
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<RunRecord> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str());
}

}  // namespace stagebo::harness
