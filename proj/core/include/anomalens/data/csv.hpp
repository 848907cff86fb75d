#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "anomalens/types.hpp"

namespace anomalens::data {

/// Numeric table: a header row of column names and one record per column of
/// `records` (the library-wide Dataset layout).
struct NumericTable {
  std::vector<std::string> header;
  Dataset records;
};

/// Splits one comma-separated line. Fields are trimmed; quoting is not
/// supported.
std::vector<std::string> split_csv_line(const std::string& line);

/// Parses a decimal number, rejecting trailing garbage.
bool parse_double(const std::string& text, double& value);

/// Reads a numeric CSV with a header row. Throws DataError with the line
/// number on a malformed row.
NumericTable read_numeric_csv(const std::filesystem::path& path);

/// Writes a numeric CSV; values use the shortest round-trip representation.
void write_numeric_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                       const Dataset& records);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Default names "x0", "x1", ...
std::vector<std::string> default_feature_names(Index count, const std::string& prefix = "x");

}  // namespace anomalens::data
