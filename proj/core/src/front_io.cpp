#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "stagebo/problems.hpp"

namespace stagebo {

Matrix read_front_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open front file " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw DataError("empty front file " + path.string());
  Eigen::Index cols = 0;
  {
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) {
      if (cell != "f" + std::to_string(cols + 1)) {
        throw DataError("bad front header in " + path.string());
      }
      ++cols;
    }
  }
  if (cols == 0) throw DataError("front header has no columns in " + path.string());

  std::vector<Vector> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    Vector row(cols);
    Eigen::Index j = 0;
    while (std::getline(ss, cell, ',')) {
      if (j >= cols) throw DataError("too many columns in " + path.string());
      std::size_t used = 0;
      try {
        row[j] = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw DataError("unparsable value '" + cell + "' in " + path.string());
      }
      if (used != cell.size()) throw DataError("trailing characters in " + path.string());
      ++j;
    }
    if (j != cols) throw DataError("too few columns in " + path.string());
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("front file has no points: " + path.string());
  return stack_rows(rows, cols);
}

void write_front_csv(const std::filesystem::path& path, const Matrix& points) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write front file " + path.string());
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    out << (j ? "," : "") << "f" << (j + 1);
  }
  out << '\n';
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
      out << (j ? "," : "") << fmt::format("{:.17g}", points(i, j));
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing front file " + path.string());
}

}  // namespace stagebo
