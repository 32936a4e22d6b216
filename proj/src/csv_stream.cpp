#include "rsindy/csv_stream.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <unordered_map>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "rsindy/error.hpp"

namespace rsindy {

namespace {

std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> out;
  std::string cell;
  for (char c : line) {
    if (c == delimiter) {
      out.push_back(cell);
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  out.push_back(cell);
  return out;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\"");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\"");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(const std::string& cell, ColumnType type) {
  const std::string s = trim(cell);
  if (s.empty()) return std::nullopt;
  if (type == ColumnType::Integer) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return static_cast<double>(v);
  }
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

CsvStream load_csv_stream(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  return load_csv_stream(in, schema);
}

CsvStream load_csv_stream(std::istream& in, const CsvSchema& schema) {
  if (schema.columns.empty()) fail(ErrorCode::SchemaError, "schema declares no columns");

  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) {
    fail(ErrorCode::IoError, "input is empty (no header row)");
  }
  const auto header = split_line(line, schema.delimiter);
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < header.size(); ++i) position[trim(header[i])] = i;

  struct Binding {
    std::size_t index;
    ColumnType type;
    std::string name;
  };
  std::vector<Binding> features;
  std::optional<Binding> label;
  for (const auto& col : schema.columns) {
    const auto it = position.find(col.name);
    if (it == position.end()) fail(ErrorCode::SchemaError, "header is missing column '" + col.name + "'");
    if (col.type == ColumnType::Text) continue;
    if (col.name == schema.label_column) {
      label = Binding{it->second, col.type, col.name};
    } else {
      features.push_back({it->second, col.type, col.name});
    }
  }
  if (!label) fail(ErrorCode::SchemaError, "label column '" + schema.label_column + "' is not a declared numeric column");

  CsvStream out;
  for (const auto& f : features) out.data.feature_names.push_back(f.name);

  std::size_t line_no = 1;
  long long step = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_line(line, schema.delimiter);
    std::string problem;
    Eigen::VectorXd x(static_cast<Eigen::Index>(features.size()));
    double y = 0.0;
    if (cells.size() < header.size()) {
      problem = fmt::format("expected {} cells, found {}", header.size(), cells.size());
    } else {
      for (std::size_t k = 0; k < features.size() && problem.empty(); ++k) {
        const auto v = parse_number(cells[features[k].index], features[k].type);
        if (!v) {
          problem = fmt::format("column '{}' is not numeric: '{}'", features[k].name,
                                cells[features[k].index]);
        } else {
          x(static_cast<Eigen::Index>(k)) = *v;
        }
      }
      if (problem.empty()) {
        const auto v = parse_number(cells[label->index], label->type);
        if (!v) {
          problem = fmt::format("label column '{}' is not numeric: '{}'", label->name,
                                cells[label->index]);
        } else {
          y = *v;
        }
      }
    }
    if (!problem.empty()) {
      if (schema.strict) {
        fail(ErrorCode::ParseError, fmt::format("line {}: {}", line_no, problem), line_no);
      }
      out.malformed.push_back({line_no, problem});
      continue;
    }
    out.data.observations.push_back({++step, std::move(x), y});
  }
  return out;
}

void write_dataset_csv(std::ostream& out, const Dataset& data, const std::string& label_column) {
  for (const auto& name : data.feature_names) out << name << ',';
  out << label_column << '\n';
  for (const auto& obs : data.observations) {
    for (Eigen::Index i = 0; i < obs.x.size(); ++i) fmt::print(out, "{:.17g},", obs.x(i));
    fmt::print(out, "{:.17g}\n", obs.y);
  }
}

double logit_transform(double rate_percent) {
  if (!(rate_percent > 0.0 && rate_percent < 100.0)) {
    fail(ErrorCode::InvalidInput, "rate must lie strictly inside (0, 100)");
  }
  return std::log(rate_percent / (100.0 - rate_percent));
}

double inverse_logit_transform(double y) {
  if (!std::isfinite(y)) fail(ErrorCode::InvalidInput, "non-finite logit value");
  return 100.0 / (1.0 + std::exp(-y));
}

}  // namespace rsindy
