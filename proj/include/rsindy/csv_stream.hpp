#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rsindy/datagen.hpp"

namespace rsindy {

enum class ColumnType { Real, Integer, Text };

struct ColumnSpec {
  std::string name;
  ColumnType type = ColumnType::Real;
};

/// Declared input layout. Every numeric column except the label becomes a
/// feature, in declaration order; text columns are checked for presence only.
/// Extra columns in the file are ignored.
struct CsvSchema {
  std::vector<ColumnSpec> columns;
  std::string label_column;
  char delimiter = ',';
  /// Strict loading throws ParseError on the first malformed row; otherwise
  /// malformed rows are skipped and reported.
  bool strict = true;
};

struct MalformedRow {
  std::size_t line;  // 1-based, header is line 1
  std::string message;
};

struct CsvStream {
  Dataset data;
  std::vector<MalformedRow> malformed;
};

CsvStream load_csv_stream(const std::filesystem::path& path, const CsvSchema& schema);
CsvStream load_csv_stream(std::istream& in, const CsvSchema& schema);

/// Writes a dataset as CSV (feature columns then the label column).
void write_dataset_csv(std::ostream& out, const Dataset& data, const std::string& label_column);

/// y = log(r / (100 - r)) for a percentage r in (0, 100).
double logit_transform(double rate_percent);
double inverse_logit_transform(double y);

}  // namespace rsindy
