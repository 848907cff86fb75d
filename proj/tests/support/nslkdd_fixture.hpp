#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "anomalens/rng.hpp"

namespace anomalens::testing {

/// Writes a small KDD-format file: 41 fields, a class tag and a difficulty
/// level. Normal rows use a low same_srv_rate; DoS rows a high one.
/// `extra_service` adds a service value only this file contains.
inline void write_nslkdd_fixture(const std::filesystem::path& path, std::uint64_t seed,
                                 std::size_t normals, std::size_t attacks,
                                 const std::string& extra_service = "") {
  static const std::vector<std::string> kProtocols{"tcp", "udp", "icmp"};
  static const std::vector<std::string> kServices{"http", "ftp", "smtp", "private"};
  static const std::vector<std::string> kFlags{"SF", "S0", "REJ"};
  static const std::vector<std::string> kAttacks{"neptune", "satan", "guess_passwd", "buffer_overflow"};
  Rng rng(seed);
  std::ofstream out(path);
  auto row = [&](const std::string& tag, bool attack) {
    std::vector<std::string> f;
    f.push_back(std::to_string(rng.below(100)));  // duration
    f.push_back(kProtocols[rng.below(kProtocols.size())]);
    const bool odd = !extra_service.empty() && rng.bernoulli(0.1);
    f.push_back(odd ? extra_service : kServices[rng.below(kServices.size())]);
    f.push_back(kFlags[rng.below(kFlags.size())]);
    for (int c = 4; c < 41; ++c) {
      double v = rng.uniform();
      if (c == 28) v = attack ? 0.9 + 0.1 * rng.uniform() : 0.1 * rng.uniform();  // same_srv_rate
      f.push_back(std::to_string(v));
    }
    f.push_back(tag);
    f.push_back(std::to_string(rng.below(21)));
    for (std::size_t i = 0; i < f.size(); ++i) out << (i ? "," : "") << f[i];
    out << '\n';
  };
  for (std::size_t i = 0; i < normals; ++i) row("normal", false);
  for (std::size_t i = 0; i < attacks; ++i) row(kAttacks[i % kAttacks.size()], true);
}

}  // namespace anomalens::testing
