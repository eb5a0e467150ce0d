#include "scalemix/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "scalemix/error.hpp"

namespace scalemix {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class Matrix>
void write_matrix(std::ostream& out, const std::vector<std::string>& header, const Matrix& m,
                  auto&& fmt) {
  if (!header.empty() && static_cast<Eigen::Index>(header.size()) != m.cols())
    throw Error(ErrorCode::DimensionMismatch, "CSV header does not match the matrix width");
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  if (!header.empty()) out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << fmt(m(i, j));
    out << '\n';
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot write " + path);
  return f;
}

}  // namespace

CsvTable read_csv(std::istream& in, const std::string& source) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, source + ": empty file");
  for (auto cell : split(line)) {
    if (cell.empty()) throw Error(ErrorCode::ParseError, source + ": empty column name in header");
    t.header.emplace_back(cell);
  }
  const std::size_t width = t.header.size();

  std::vector<double> cells;
  std::size_t rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto parts = split(line);
    if (parts.size() != width)
      throw Error(ErrorCode::ParseError, source + ": line " + std::to_string(line_no) + " has " +
                                             std::to_string(parts.size()) + " cells, expected " +
                                             std::to_string(width));
    for (std::size_t j = 0; j < width; ++j) {
      double v = 0.0;
      const auto cell = parts[j];
      const char* end = cell.data() + cell.size();
      const char* begin = cell.data();
      if (begin != end && *begin == '+') ++begin;
      const auto res = std::from_chars(begin, end, v);
      if (cell.empty() || res.ec != std::errc() || res.ptr != end || !std::isfinite(v))
        throw Error(ErrorCode::ParseError, source + ": line " + std::to_string(line_no) +
                                               ", column " + std::to_string(j + 1) + " (" +
                                               t.header[j] + "): not a finite number '" +
                                               std::string(cell) + "'");
      cells.push_back(v);
    }
    ++rows;
  }
  t.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < width; ++j) t.values(i, j) = cells[i * width + j];
  return t;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open " + path);
  return read_csv(f, path);
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(std::ostream& out, const std::vector<std::string>& header, const Eigen::MatrixXd& m) {
  write_matrix(out, header, m, [](double x) { return format_double(x); });
}

void write_csv(std::ostream& out, const std::vector<std::string>& header, const Eigen::MatrixXi& m) {
  write_matrix(out, header, m, [](int x) { return std::to_string(x); });
}

void write_csv_file(const std::string& path, const std::vector<std::string>& header,
                    const Eigen::MatrixXd& m) {
  auto f = open_out(path);
  write_csv(f, header, m);
}

void write_csv_file(const std::string& path, const std::vector<std::string>& header,
                    const Eigen::MatrixXi& m) {
  auto f = open_out(path);
  write_csv(f, header, m);
}

}  // namespace scalemix
