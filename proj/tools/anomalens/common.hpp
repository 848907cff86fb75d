#pragma once

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "anomalens/data/csv.hpp"
#include "anomalens/io/config.hpp"

namespace anomalens::cli {

/// Options every subcommand accepts.
struct CommonOptions {
  std::string config_path;
  std::uint64_t seed = 0;
  CLI::Option* seed_option = nullptr;

  void attach(CLI::App& cmd);
  io::Config load_config() const;
  std::uint64_t resolve_seed(const io::Config& config) const;
};

/// Warns on stderr about config keys nobody read.
void warn_unused(const io::Config& config);

/// Reads a CSV with a header row; one record per row.
data::NumericTable load_table(const std::string& path);

/// Index of `name` in the header, or DataError.
Index column_index(const data::NumericTable& table, const std::string& name,
                   const std::string& path);

/// Long-format rows get printed to `out_path` or stdout when it is empty.
class Output {
 public:
  explicit Output(const std::string& out_path);
  std::ostream& stream() { return file_ ? *file_ : *stdout_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stdout_;
};

std::vector<Index> parse_index_list(const std::string& text);

void register_model_commands(CLI::App& app);
void register_eval_commands(CLI::App& app);
void register_data_commands(CLI::App& app);
void register_experiment_commands(CLI::App& app);

}  // namespace anomalens::cli
