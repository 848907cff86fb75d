#include "anomalens/data/nslkdd.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "anomalens/data/csv.hpp"
#include "anomalens/error.hpp"

#ifndef ANOMALENS_SOURCE_DATA_DIR
#define ANOMALENS_SOURCE_DATA_DIR "data"
#endif
#ifndef ANOMALENS_INSTALL_DATA_DIR
#define ANOMALENS_INSTALL_DATA_DIR "data"
#endif

namespace anomalens::data {

NslKddSchema NslKddSchema::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open NSL-KDD schema " + path.string());
  NslKddSchema schema;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream words(line);
    std::string kind, a, b;
    if (!(words >> kind) || kind[0] == '#') continue;
    if (!(words >> a >> b)) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected three fields");
    }
    if (kind == "column") {
      if (b != "numeric" && b != "symbolic") {
        throw DataError(path.string() + ":" + std::to_string(line_no) + ": bad column kind " + b);
      }
      schema.columns.push_back({a, b == "symbolic"});
    } else if (kind == "class") {
      schema.categories[a] = b;
    } else {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": unknown entry " + kind);
    }
  }
  if (schema.columns.empty()) throw DataError(path.string() + ": no columns");
  return schema;
}

NslKddSchema NslKddSchema::standard() {
  const char* kFile = "nslkdd_schema.txt";
  std::vector<std::filesystem::path> candidates;
  if (const char* env = std::getenv("ANOMALENS_DATA_DIR"); env != nullptr && *env != '\0') {
    candidates.emplace_back(env);
  }
  candidates.emplace_back(ANOMALENS_INSTALL_DATA_DIR);
  candidates.emplace_back(ANOMALENS_SOURCE_DATA_DIR);
  for (const auto& dir : candidates) {
    std::error_code ec;
    if (std::filesystem::exists(dir / kFile, ec)) return load(dir / kFile);
  }
  throw DataError(std::string("cannot find ") + kFile + "; set ANOMALENS_DATA_DIR");
}

const std::string& NslKddSchema::category(const std::string& tag) const {
  const auto it = categories.find(tag);
  if (it == categories.end()) throw DataError("unknown NSL-KDD class tag '" + tag + "'");
  return it->second;
}

const std::vector<std::string>& nslkdd_categories() {
  static const std::vector<std::string> kCategories{"normal", "DoS", "probing", "R2L", "U2R"};
  return kCategories;
}

std::vector<NslKddRow> read_nslkdd_rows(const std::filesystem::path& path,
                                        const NslKddSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  const std::size_t n = schema.columns.size();
  std::vector<NslKddRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != n + 1 && fields.size() != n + 2) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(n + 1) + " or " + std::to_string(n + 2) + " fields, got " +
                      std::to_string(fields.size()));
    }
    NslKddRow row;
    row.line = line_no;
    row.tag = fields[n];
    if (!row.tag.empty() && row.tag.back() == '.') row.tag.pop_back();
    if (!schema.categories.contains(row.tag)) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": unknown class tag '" +
                      row.tag + "'");
    }
    fields.resize(n);
    row.fields = std::move(fields);
    rows.push_back(std::move(row));
  }
  return rows;
}

NslKddEncoder NslKddEncoder::fit(const NslKddSchema& schema, const std::vector<NslKddRow>& train) {
  if (train.empty()) throw DataError("NSL-KDD: empty training file");
  NslKddEncoder enc;
  enc.schema_ = schema;
  const std::size_t n = schema.columns.size();
  std::vector<std::set<std::string>> seen(n);
  for (const auto& row : train) {
    for (std::size_t c = 0; c < n; ++c) {
      if (schema.columns[c].symbolic) seen[c].insert(row.fields[c]);
    }
  }
  Index offset = 0;
  for (std::size_t c = 0; c < n; ++c) {
    enc.offsets_.push_back(offset);
    const auto& col = schema.columns[c];
    if (col.symbolic) {
      enc.vocab_.emplace_back(seen[c].begin(), seen[c].end());
      for (const auto& value : enc.vocab_.back()) enc.names_.push_back(col.name + "_" + value);
      offset += static_cast<Index>(seen[c].size());
    } else {
      enc.vocab_.emplace_back();
      enc.names_.push_back(col.name);
      offset += 1;
    }
  }
  return enc;
}

FeatureVector NslKddEncoder::encode(const NslKddRow& row) const {
  FeatureVector x = FeatureVector::Zero(width());
  for (std::size_t c = 0; c < schema_.columns.size(); ++c) {
    const std::string& field = row.fields[c];
    if (schema_.columns[c].symbolic) {
      const auto& vocab = vocab_[c];
      const auto it = std::lower_bound(vocab.begin(), vocab.end(), field);
      if (it != vocab.end() && *it == field) x[offsets_[c] + (it - vocab.begin())] = 1.0;
    } else {
      double v = 0.0;
      if (!parse_double(field, v)) {
        throw DataError("NSL-KDD line " + std::to_string(row.line) + ": column " +
                        schema_.columns[c].name + " is not numeric: '" + field + "'");
      }
      x[offsets_[c]] = v;
    }
  }
  return x;
}

Dataset NslKddEncoder::encode(const std::vector<NslKddRow>& rows) const {
  Dataset out(width(), static_cast<Index>(rows.size()));
  for (std::size_t t = 0; t < rows.size(); ++t) out.col(static_cast<Index>(t)) = encode(rows[t]);
  return out;
}

NslKddData encode_nslkdd(const NslKddEncoder& encoder, const NslKddSchema& schema,
                         const std::vector<NslKddRow>& rows) {
  NslKddData data;
  data.features = encoder.encode(rows);
  data.feature_names = encoder.feature_names();
  data.classes.reserve(rows.size());
  for (const auto& row : rows) data.classes.push_back(schema.category(row.tag));
  return data;
}

NslKddSplit load_nslkdd(const std::filesystem::path& train, const std::filesystem::path& test,
                        const NslKddSchema& schema) {
  const auto train_rows = read_nslkdd_rows(train, schema);
  const auto test_rows = read_nslkdd_rows(test, schema);
  const NslKddEncoder encoder = NslKddEncoder::fit(schema, train_rows);
  return {encode_nslkdd(encoder, schema, train_rows), encode_nslkdd(encoder, schema, test_rows)};
}

Dataset select_class(const NslKddData& data, const std::string& category) {
  std::vector<Index> keep;
  for (std::size_t t = 0; t < data.classes.size(); ++t) {
    if (data.classes[t] == category) keep.push_back(static_cast<Index>(t));
  }
  Dataset out(data.features.rows(), static_cast<Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) out.col(static_cast<Index>(i)) = data.features.col(keep[i]);
  return out;
}

}  // namespace anomalens::data
