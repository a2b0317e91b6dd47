#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

namespace resispike {

struct CsvOptions {
  char delimiter = ',';
  bool header = false;     // skip the first non-empty line
  bool transpose = false;  // file rows are observations instead of variables
};

// Numeric matrix, rows as in the file unless transpose is set. LF and CRLF
// line endings are equivalent; blank lines are ignored. Errors carry
// "source:line:column".
Eigen::MatrixXd read_csv(std::istream& in, const CsvOptions& options = {}, const std::string& source = "<input>");
Eigen::MatrixXd read_csv_file(const std::string& path, const CsvOptions& options = {});

void write_csv(std::ostream& out, const Eigen::MatrixXd& m, char delimiter = ',');

// Table output for summaries; numbers are preformatted by the caller.
void write_csv_table(std::ostream& out, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows);

// Shortest text that parses back to the same double.
std::string format_double(double v);

}  // namespace resispike
