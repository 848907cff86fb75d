#include "anomalens/eval/manifest.hpp"

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "anomalens/io/model_io.hpp"

#ifndef ANOMALENS_VERSION
#define ANOMALENS_VERSION "unknown"
#endif

namespace anomalens::eval {

std::string library_version() { return ANOMALENS_VERSION; }

void write_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  nlohmann::ordered_json j;
  j["experiment"] = manifest.experiment;
  j["versions"] = {{"anomalens", library_version()},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                 std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"compiler", __VERSION__},
                   {"model_format", io::kModelFormatVersion}};
  nlohmann::ordered_json settings = nlohmann::ordered_json::object();
  for (const auto& [key, value] : manifest.settings) settings[key] = value;
  j["settings"] = std::move(settings);
  nlohmann::ordered_json seeds = nlohmann::ordered_json::object();
  for (const auto& [key, value] : manifest.seeds) seeds[key] = value;
  j["seeds"] = std::move(seeds);
  io::write_text(path, j.dump(2) + "\n");
}

}  // namespace anomalens::eval
