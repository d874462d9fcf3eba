#ifndef NDIS_CSV_HPP
#define NDIS_CSV_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "ndis/linalg.hpp"

namespace ndis {

struct CsvTable {
  Matrix values;
  bool had_header = false;
  std::vector<std::string> header;  // empty when had_header is false
};

// Comma-separated finite decimals, optional single header row (detected by
// a non-numeric first row). Rejects ragged rows with a 1-based location.
CsvTable load_csv(const std::string& path);
CsvTable parse_csv(std::istream& in, const std::string& name);

// Last column is the response.
RegressionData as_regression(const CsvTable& table);

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const Matrix& values);

}  // namespace ndis

#endif  // NDIS_CSV_HPP
