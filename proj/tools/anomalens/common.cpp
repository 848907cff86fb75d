#include "common.hpp"

#include <fstream>
#include <iostream>

#include "anomalens/error.hpp"

namespace anomalens::cli {

void CommonOptions::attach(CLI::App& cmd) {
  cmd.add_option("--config", config_path, "Settings file (key = value)");
  seed_option = cmd.add_option("--seed", seed, "Global seed");
}

io::Config CommonOptions::load_config() const {
  if (config_path.empty()) return io::Config{};
  return io::Config::load(config_path);
}

std::uint64_t CommonOptions::resolve_seed(const io::Config& config) const {
  std::optional<std::uint64_t> explicit_seed;
  if (seed_option != nullptr && seed_option->count() > 0) explicit_seed = seed;
  return io::resolve_seed(explicit_seed, config);
}

void warn_unused(const io::Config& config) {
  for (const auto& key : config.unused_keys()) {
    std::cerr << "warning: unused config key '" << key << "'\n";
  }
}

data::NumericTable load_table(const std::string& path) { return data::read_numeric_csv(path); }

Index column_index(const data::NumericTable& table, const std::string& name,
                   const std::string& path) {
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (table.header[i] == name) return static_cast<Index>(i);
  }
  throw DataError(path + ": no column named '" + name + "'");
}

Output::Output(const std::string& out_path) : stdout_(&std::cout) {
  if (out_path.empty()) return;
  const std::filesystem::path p(out_path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  file_ = std::make_unique<std::ofstream>(p);
  if (!*file_) throw DataError("cannot write " + out_path);
}

std::vector<Index> parse_index_list(const std::string& text) {
  std::vector<Index> out;
  for (const auto& field : data::split_csv_line(text)) {
    double v = 0.0;
    if (!data::parse_double(field, v) || v < 0 || v != static_cast<double>(static_cast<Index>(v))) {
      throw UsageError("expected a list of non-negative integers, got '" + text + "'");
    }
    out.push_back(static_cast<Index>(v));
  }
  return out;
}

}  // namespace anomalens::cli
