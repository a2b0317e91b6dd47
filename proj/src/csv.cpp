#include "resispike/csv.hpp"

#include "resispike/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace resispike {

namespace {

[[noreturn]] void fail(const std::string& source, std::size_t line, std::size_t col, const std::string& what) {
  throw Error(ErrorCode::ParseError, source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
}

bool is_blank(const std::string& s) { return s.find_first_not_of(" \t") == std::string::npos; }

}  // namespace

Eigen::MatrixXd read_csv(std::istream& in, const CsvOptions& options, const std::string& source) {
  if (options.delimiter == '.' || options.delimiter == '-' || options.delimiter == '+' ||
      (options.delimiter >= '0' && options.delimiter <= '9')) {
    throw Error(ErrorCode::InvalidArgument, "read_csv: delimiter clashes with number syntax");
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  bool header_pending = options.header;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    std::vector<double> row;
    std::size_t pos = 0;
    for (;;) {
      const std::size_t end = std::min(line.find(options.delimiter, pos), line.size());
      std::size_t a = pos, b = end;
      while (a < b && (line[a] == ' ' || line[a] == '\t')) ++a;
      while (b > a && (line[b - 1] == ' ' || line[b - 1] == '\t')) --b;
      if (a == b) fail(source, lineno, pos + 1, "empty field");
      const char* first = line.data() + a;
      if (*first == '+') ++first;  // from_chars rejects a leading plus
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(first, line.data() + b, v);
      if (ec != std::errc() || ptr != line.data() + b) {
        fail(source, lineno, a + 1, "not a number: '" + line.substr(a, b - a) + "'");
      }
      if (!std::isfinite(v)) fail(source, lineno, a + 1, "non-finite value");
      row.push_back(v);
      if (end == line.size()) break;
      pos = end + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      fail(source, lineno, 1,
           "expected " + std::to_string(rows.front().size()) + " fields, found " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (in.bad()) throw Error(ErrorCode::ParseError, source + ": read failure");
  if (rows.empty()) fail(source, lineno + 1, 1, "no data rows");

  Eigen::MatrixXd out(Eigen::Index(rows.size()), Eigen::Index(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) out(Eigen::Index(i), Eigen::Index(j)) = rows[i][j];
  }
  if (options.transpose) return out.transpose();
  return out;
}

Eigen::MatrixXd read_csv_file(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
  return read_csv(in, options, path);
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return std::to_string(v);
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const Eigen::MatrixXd& m, char delimiter) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << delimiter;
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

void write_csv_table(std::ostream& out, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
  const auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (j) out << ',';
      out << cells[j];
    }
    out << '\n';
  };
  emit(header);
  for (const auto& r : rows) emit(r);
}

}  // namespace resispike
