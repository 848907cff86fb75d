#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "anomalens/types.hpp"

namespace anomalens::data {

enum class SimLayout {
  kInterleaved,  // component i, slot j at index i + n_components * j
  kBlock,        // component i, slot j at index i * dims_per_component + j
};

/// Correlated-component simulator. Each record draws, per component i, a base
/// value x_i ~ N(base_mean, base_std^2) in slot 0 and fills slots j >= 1 with
/// (1 + 0.1 j) * x_i^2 + N(beta, gamma^2).
struct SimConfig {
  Index n_components = 10;
  Index dims_per_component = 100;
  double beta = 100.0;
  double gamma = 50.0;
  Index records = 10000;
  double base_mean = 1000.0;
  double base_std = 200.0;
  SimLayout layout = SimLayout::kInterleaved;
  std::uint64_t seed = 0;

  Index dim() const noexcept { return n_components * dims_per_component; }
  void validate() const;
};

/// Index of (component, slot) under the configured layout.
Index sim_index(const SimConfig& config, Index component, Index slot);

/// One record per column. Record t draws from its own substream of the seed,
/// so any prefix of the output is independent of `records`.
Dataset gen_simulated(const SimConfig& config);

/// A single record with the given index, identical to column `index` of
/// gen_simulated for the same config.
FeatureVector gen_simulated_record(const SimConfig& config, Index index);

enum class FaultDirection { kIncrease, kDecrease };

std::string to_string(FaultDirection direction);
FaultDirection parse_fault_direction(const std::string& text);

struct FaultSpec {
  Index n_f = 10;
  FaultDirection direction = FaultDirection::kIncrease;
  std::optional<Index> component;  // drawn uniformly when unset
  std::optional<double> r;         // drawn from [2, 10] or [1/10, 1/2] when unset
};

/// Ground truth for one injected fault. Never used in training.
struct EventLabel {
  Index record = 0;
  std::vector<Index> dims;  // ascending
  std::string tag;
};

struct FaultResult {
  FeatureVector record;
  EventLabel label;
  Index component = 0;
  double r = 1.0;
};

/// Multiplies n_f distinct correlated slots (j >= 1) of one component by r.
/// Fully determined by `seed`.
FaultResult inject_fault(const FeatureVector& record, const SimConfig& config,
                         const FaultSpec& spec, std::uint64_t seed);

}  // namespace anomalens::data
