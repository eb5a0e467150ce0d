#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace scalemix {

struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd values;
};

// Comma-separated with a header row; every cell numeric. Throws
// Error(ParseError) naming the line and column of the first bad cell.
CsvTable read_csv(std::istream& in, const std::string& source = "<stream>");
CsvTable read_csv_file(const std::string& path);

// Shortest text that reads back as the same double ("%.17g").
std::string format_double(double x);

void write_csv(std::ostream& out, const std::vector<std::string>& header, const Eigen::MatrixXd& m);
void write_csv(std::ostream& out, const std::vector<std::string>& header, const Eigen::MatrixXi& m);
void write_csv_file(const std::string& path, const std::vector<std::string>& header,
                    const Eigen::MatrixXd& m);
void write_csv_file(const std::string& path, const std::vector<std::string>& header,
                    const Eigen::MatrixXi& m);

}  // namespace scalemix
