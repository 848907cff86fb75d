#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "anomalens/contribution/contribution.hpp"
#include "anomalens/nn/train.hpp"

namespace anomalens::io {

/// Flat `key = value` settings with dotted namespaces (train.epochs,
/// contribution.lambdas). Lines starting with '#' are comments. Lists are
/// comma-separated.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& source = "<config>");
  /// Throws UsageError if the file cannot be read.
  static Config load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  bool contains(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const;

  /// Keys that were set but never read; a sign of a typo.
  std::vector<std::string> unused_keys() const;
  const std::map<std::string, std::string>& entries() const noexcept { return values_; }

 private:
  const std::string* find(const std::string& key) const;

  std::map<std::string, std::string> values_;
  std::string source_;
  mutable std::set<std::string> used_;
};

/// Seed precedence: explicit value, then the `seed` key, then the
/// ANOMALENS_SEED environment variable, then 0.
std::uint64_t resolve_seed(std::optional<std::uint64_t> explicit_seed, const Config& config);

/// Reads `<prefix>.epochs`, `.batch_size`, `.learning_rate`, `.weight_decay`.
nn::TrainConfig train_config(const Config& config, const std::string& prefix,
                             nn::TrainConfig defaults);

/// Reads contribution.lambdas, .step_size, .initial_step, .max_iters,
/// .mse_stop, .tolerance.
contribution::ContributionConfig contribution_config(const Config& config,
                                                     contribution::ContributionConfig defaults = {});

}  // namespace anomalens::io
