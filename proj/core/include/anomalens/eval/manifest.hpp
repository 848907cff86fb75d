#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace anomalens::eval {

/// Provenance written next to experiment results: settings, seeds and the
/// library, compiler and Eigen versions.
struct Manifest {
  std::string experiment;
  std::vector<std::pair<std::string, std::string>> settings;
  std::vector<std::pair<std::string, std::uint64_t>> seeds;
};

std::string library_version();

void write_manifest(const std::filesystem::path& path, const Manifest& manifest);

}  // namespace anomalens::eval
