#include "ndis/csv.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace ndis {
namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& out) {
  const char* begin = s.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  if (end == begin) return false;
  while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
  return *end == '\0';
}

}  // namespace

CsvTable parse_csv(std::istream& in, const std::string& name) {
  std::vector<std::vector<double>> rows;
  CsvTable table;
  std::string line;
  long line_no = 0;
  Eigen::Index width = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (width < 0) {
      // First row: header if any field is non-numeric.
      bool numeric = true;
      double v;
      for (const auto& f : fields)
        if (!parse_double(f, v)) numeric = false;
      if (!numeric) {
        table.had_header = true;
        table.header = fields;
        width = static_cast<Eigen::Index>(fields.size());
        continue;
      }
      width = static_cast<Eigen::Index>(fields.size());
    }
    if (static_cast<Eigen::Index>(fields.size()) != width)
      throw ParseError(name + ": expected " + std::to_string(width) +
                           " fields, got " + std::to_string(fields.size()),
                       line_no, static_cast<long>(fields.size()));
    std::vector<double> row(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      double v;
      if (!parse_double(fields[i], v) || !std::isfinite(v))
        throw ParseError(name + ": not a finite number: '" + fields[i] + "'",
                         line_no, static_cast<long>(i + 1));
      row[i] = v;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw EmptyInput(name + ": no data rows");
  table.values.resize(static_cast<Eigen::Index>(rows.size()), width);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (Eigen::Index j = 0; j < width; ++j)
      table.values(static_cast<Eigen::Index>(i), j) =
          rows[i][static_cast<std::size_t>(j)];
  return table;
}

CsvTable load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open input file: " + path);
  return parse_csv(in, path);
}

RegressionData as_regression(const CsvTable& table) {
  if (table.values.cols() < 2)
    throw ShapeMismatch("regression input needs at least two columns");
  RegressionData out;
  out.B = table.values.leftCols(table.values.cols() - 1);
  out.b = table.values.rightCols(1);
  return out;
}

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const Matrix& values) {
  for (std::size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? "," : "\n");
  out.precision(17);
  for (Eigen::Index i = 0; i < values.rows(); ++i)
    for (Eigen::Index j = 0; j < values.cols(); ++j)
      out << values(i, j) << (j + 1 < values.cols() ? "," : "\n");
}

}  // namespace ndis
