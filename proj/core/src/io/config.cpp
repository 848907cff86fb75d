#include "anomalens/io/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "anomalens/data/csv.hpp"
#include "anomalens/error.hpp"

namespace anomalens::io {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  return s.substr(begin, s.find_last_not_of(" \t\r") - begin + 1);
}

template <typename T>
T parse_integer(const std::string& text, const std::string& key) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw UsageError("config key " + key + ": not an integer: '" + text + "'");
  }
  return value;
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& source) {
  Config cfg;
  cfg.source_ = source;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw UsageError(source + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(stripped.substr(0, eq));
    if (key.empty()) throw UsageError(source + ":" + std::to_string(line_no) + ": empty key");
    cfg.values_[key] = trim(stripped.substr(eq + 1));
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

bool Config::contains(const std::string& key) const { return values_.contains(key); }

const std::string* Config::find(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return nullptr;
  used_.insert(key);
  return &it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const std::string* v = find(key);
  return v ? *v : fallback;
}

double Config::get_double(const std::string& key, double fallback) const {
  const std::string* v = find(key);
  if (!v) return fallback;
  double out = 0.0;
  if (!data::parse_double(*v, out)) throw UsageError("config key " + key + ": not a number: '" + *v + "'");
  return out;
}

long long Config::get_int(const std::string& key, long long fallback) const {
  const std::string* v = find(key);
  return v ? parse_integer<long long>(*v, key) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  const std::string* v = find(key);
  return v ? parse_integer<std::uint64_t>(*v, key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const std::string* v = find(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  throw UsageError("config key " + key + ": not a boolean: '" + *v + "'");
}

std::vector<double> Config::get_doubles(const std::string& key, std::vector<double> fallback) const {
  const std::string* v = find(key);
  if (!v) return fallback;
  std::vector<double> out;
  for (const auto& field : data::split_csv_line(*v)) {
    double x = 0.0;
    if (!data::parse_double(field, x)) {
      throw UsageError("config key " + key + ": not a number: '" + field + "'");
    }
    out.push_back(x);
  }
  return out;
}

std::vector<std::string> Config::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [key, value] : values_) {
    if (!used_.contains(key)) out.push_back(key);
  }
  return out;
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> explicit_seed, const Config& config) {
  if (explicit_seed) return *explicit_seed;
  if (config.contains("seed")) return config.get_u64("seed", 0);
  if (const char* env = std::getenv("ANOMALENS_SEED"); env != nullptr && *env != '\0') {
    return parse_integer<std::uint64_t>(env, "ANOMALENS_SEED");
  }
  return 0;
}

nn::TrainConfig train_config(const Config& config, const std::string& prefix,
                             nn::TrainConfig defaults) {
  nn::TrainConfig out = defaults;
  out.epochs = static_cast<std::size_t>(config.get_int(prefix + ".epochs", static_cast<long long>(defaults.epochs)));
  out.batch_size = static_cast<std::size_t>(
      config.get_int(prefix + ".batch_size", static_cast<long long>(defaults.batch_size)));
  out.learning_rate = config.get_double(prefix + ".learning_rate", defaults.learning_rate);
  out.weight_decay = config.get_double(prefix + ".weight_decay", defaults.weight_decay);
  return out;
}

contribution::ContributionConfig contribution_config(const Config& config,
                                                     contribution::ContributionConfig defaults) {
  contribution::ContributionConfig out = defaults;
  out.lambdas = config.get_doubles("contribution.lambdas", defaults.lambdas);
  if (config.contains("contribution.step_size")) {
    const std::string v = config.get_string("contribution.step_size", "");
    if (v == "backtracking") {
      out.step_size.reset();
    } else {
      out.step_size = config.get_double("contribution.step_size", 0.0);
    }
  }
  out.initial_step = config.get_double("contribution.initial_step", defaults.initial_step);
  out.max_iters = static_cast<std::size_t>(
      config.get_int("contribution.max_iters", static_cast<long long>(defaults.max_iters)));
  if (config.contains("contribution.mse_stop")) {
    out.mse_stop = config.get_double("contribution.mse_stop", 0.0);
  }
  out.tolerance = config.get_double("contribution.tolerance", defaults.tolerance);
  return out;
}

}  // namespace anomalens::io
