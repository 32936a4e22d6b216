#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rsindy/datagen.hpp"
#include "rsindy/run_config.hpp"
#include "rsindy/serialization.hpp"

namespace rsindy {

inline constexpr const char* kReportSchemaVersion = "rsindy.report/1";

/// A CSV file held as pre-formatted cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Everything a run produces; file name -> table, plus the summary document.
struct RunArtifacts {
  std::map<std::string, CsvTable> tables;
  Json summary;
};

/// Shortest round-trip-stable text for report numbers ("{:.12g}"; NaN -> "NA").
std::string format_number(double v);

/// The stream a configuration refers to: a generated simulation, a synthetic
/// stand-in, or a local CSV (label transform applied).
Dataset load_input(const RunConfig& config);

/// Runs an experiment or a fit-stream configuration end to end.
RunArtifacts execute(const RunConfig& config);

/// Writes every table as CSV and the summary as summary.json into `dir`,
/// creating it if needed. Output is byte-identical for identical artifacts.
void emit_report(const RunArtifacts& artifacts, const std::filesystem::path& dir);

void write_csv(std::ostream& out, const CsvTable& table);

}  // namespace rsindy
