// io.hpp: CSV ingestion, the run report and its JSON/text renderings.
#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rdcont/q_select.hpp"
#include "rdcont/sign_test.hpp"
#include "rdcont/simkit.hpp"

namespace rdcont {

enum class NaPolicy { error, drop_with_warning };

struct DataSource {
  std::filesystem::path path;
  /// Header name, or zero-based column index.
  std::variant<std::string, std::size_t> column = std::size_t{0};
  char delimiter = ',';
  bool has_header = true;
  NaPolicy na_policy = NaPolicy::error;
};

struct LoadedData {
  std::vector<double> values;
  std::vector<std::string> warnings;
};

/// Reads one numeric column. Blank cells, "NA", "NaN", "." and non-finite
/// numbers are missing values; under NaPolicy::error they raise ParseError
/// (as do non-numeric tokens), otherwise the row is dropped with a warning.
/// Throws FileNotFound, ColumnNotFound, ParseError (line in location()) or
/// EmptyAfterFiltering.
LoadedData load_data(const DataSource& src);

struct DataSummary {
  std::size_t n = 0;
  double min = 0.0;
  double max = 0.0;
  std::size_t count_below_cutoff = 0;
  std::size_t count_at_or_above = 0;
};

/// Summary on the original scale.
DataSummary summarize(const Sample& sample);

struct RunReport {
  TestResult test;
  std::optional<QSelection> q_selection;
  std::optional<BiasDiagnostics> diagnostics;
  DataSummary data_summary;
  double cutoff = 0.0;
  std::string q_rule;
};

/// Resolves q, runs the test and attaches normal-reference diagnostics when
/// the sample has a usable spread.
RunReport analyze(const Sample& sample, const TestConfig& cfg);

nlohmann::json to_json(const RunReport& report);
RunReport run_report_from_json(const nlohmann::json& j);

/// Human-readable report; numbers at 12 significant digits.
void write_text(std::ostream& out, const RunReport& report);

nlohmann::json to_json(const MCReport& report);

/// One-row CSV with header; as_nr and as_r in percent.
void write_csv(std::ostream& out, const MCReport& report);

}  // namespace rdcont
