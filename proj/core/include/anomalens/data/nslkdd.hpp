#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "anomalens/types.hpp"

namespace anomalens::data {

/// Column layout and class map read from a descriptor file.
struct NslKddSchema {
  struct Column {
    std::string name;
    bool symbolic = false;
  };
  std::vector<Column> columns;
  std::map<std::string, std::string> categories;  // class tag -> category

  static NslKddSchema load(const std::filesystem::path& path);
  /// The descriptor shipped with the library.
  static NslKddSchema standard();

  /// Category of a class tag; throws DataError for unknown tags.
  const std::string& category(const std::string& tag) const;
};

/// Categories in reporting order.
const std::vector<std::string>& nslkdd_categories();

/// One parsed line: the feature fields and the class tag.
struct NslKddRow {
  std::vector<std::string> fields;
  std::string tag;
  std::size_t line = 0;
};

/// Reads a KDD-format file. Rows must carry the schema's columns plus the
/// class tag and, optionally, a difficulty level. Throws DataError naming the
/// line on wrong arity or an unknown class tag.
std::vector<NslKddRow> read_nslkdd_rows(const std::filesystem::path& path,
                                        const NslKddSchema& schema);

/// One-hot encoder whose vocabularies come from the training rows (sorted).
/// Numeric columns pass through raw; unseen symbols encode as all zeros.
class NslKddEncoder {
 public:
  static NslKddEncoder fit(const NslKddSchema& schema, const std::vector<NslKddRow>& train);

  Index width() const noexcept { return static_cast<Index>(names_.size()); }
  const std::vector<std::string>& feature_names() const noexcept { return names_; }
  const std::vector<std::vector<std::string>>& vocabularies() const noexcept { return vocab_; }

  FeatureVector encode(const NslKddRow& row) const;
  Dataset encode(const std::vector<NslKddRow>& rows) const;

 private:
  NslKddSchema schema_;
  std::vector<std::vector<std::string>> vocab_;  // per column; empty for numeric
  std::vector<Index> offsets_;                   // per column
  std::vector<std::string> names_;
};

struct NslKddData {
  Dataset features;                 // one record per column
  std::vector<std::string> classes; // category per record
  std::vector<std::string> feature_names;
};

NslKddData encode_nslkdd(const NslKddEncoder& encoder, const NslKddSchema& schema,
                         const std::vector<NslKddRow>& rows);

/// Reads train and test files, fits vocabularies on train and encodes both.
struct NslKddSplit {
  NslKddData train;
  NslKddData test;
};
NslKddSplit load_nslkdd(const std::filesystem::path& train, const std::filesystem::path& test,
                        const NslKddSchema& schema = NslKddSchema::standard());

/// Columns of `data` whose class is `category`.
Dataset select_class(const NslKddData& data, const std::string& category);

}  // namespace anomalens::data
