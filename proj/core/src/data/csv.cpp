#include "anomalens/data/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>

#include "anomalens/error.hpp"

namespace anomalens::data {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(trim(line.substr(start)));
      return fields;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

bool parse_double(const std::string& text, double& value) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last && first != last;
}

NumericTable read_numeric_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  NumericTable table;
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": missing header row");
  table.header = split_csv_line(line);

  std::vector<double> values;
  std::size_t line_no = 1;
  Index rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != table.header.size()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(table.header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    for (const auto& f : fields) {
      double v = 0.0;
      if (!parse_double(f, v)) {
        throw DataError(path.string() + ":" + std::to_string(line_no) + ": not a number: '" + f +
                        "'");
      }
      values.push_back(v);
    }
    ++rows;
  }
  const auto cols = static_cast<Index>(table.header.size());
  table.records = Eigen::Map<const Dataset>(values.data(), cols, rows);
  return table;
}

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw DataError("cannot format number");
  return std::string(buf.data(), ptr);
}

void write_numeric_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                       const Dataset& records) {
  if (static_cast<Index>(header.size()) != records.rows()) {
    throw DataError("write_numeric_csv: header has " + std::to_string(header.size()) +
                    " names for " + std::to_string(records.rows()) + " columns");
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (Index t = 0; t < records.cols(); ++t) {
    for (Index i = 0; i < records.rows(); ++i) {
      out << (i ? "," : "") << format_double(records(i, t));
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path.string());
}

std::vector<std::string> default_feature_names(Index count, const std::string& prefix) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) names.push_back(prefix + std::to_string(i));
  return names;
}

}  // namespace anomalens::data
