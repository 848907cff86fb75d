#include "anomalens/data/simulator.hpp"

#include <algorithm>
#include <numeric>

#include "anomalens/error.hpp"
#include "anomalens/rng.hpp"

namespace anomalens::data {

void SimConfig::validate() const {
  if (n_components <= 0 || dims_per_component <= 1) {
    throw DataError("simulator: need n_components >= 1 and dims_per_component >= 2");
  }
  if (records <= 0) throw DataError("simulator: records must be positive");
  if (gamma < 0.0 || base_std < 0.0) throw DataError("simulator: negative standard deviation");
}

Index sim_index(const SimConfig& config, Index component, Index slot) {
  if (config.layout == SimLayout::kInterleaved) return component + config.n_components * slot;
  return component * config.dims_per_component + slot;
}

FeatureVector gen_simulated_record(const SimConfig& config, Index index) {
  Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(index)));
  FeatureVector x(config.dim());
  for (Index i = 0; i < config.n_components; ++i) {
    const double base = rng.normal(config.base_mean, config.base_std);
    x[sim_index(config, i, 0)] = base;
    const double squared = base * base;
    for (Index j = 1; j < config.dims_per_component; ++j) {
      x[sim_index(config, i, j)] =
          (1.0 + 0.1 * static_cast<double>(j)) * squared + rng.normal(config.beta, config.gamma);
    }
  }
  return x;
}

Dataset gen_simulated(const SimConfig& config) {
  config.validate();
  Dataset out(config.dim(), config.records);
  for (Index t = 0; t < config.records; ++t) out.col(t) = gen_simulated_record(config, t);
  return out;
}

std::string to_string(FaultDirection direction) {
  return direction == FaultDirection::kIncrease ? "increase" : "decrease";
}

FaultDirection parse_fault_direction(const std::string& text) {
  if (text == "increase") return FaultDirection::kIncrease;
  if (text == "decrease") return FaultDirection::kDecrease;
  throw UsageError("unknown fault direction '" + text + "' (expected increase or decrease)");
}

FaultResult inject_fault(const FeatureVector& record, const SimConfig& config,
                         const FaultSpec& spec, std::uint64_t seed) {
  config.validate();
  if (record.size() != config.dim()) {
    throw DataError("inject_fault: record has " + std::to_string(record.size()) +
                    " dims, simulator expects " + std::to_string(config.dim()));
  }
  const Index slots = config.dims_per_component - 1;
  if (spec.n_f < 0 || spec.n_f > slots) {
    throw DataError("inject_fault: n_f must be in [0, " + std::to_string(slots) + "]");
  }
  Rng rng(seed);
  FaultResult result;
  result.record = record;
  result.label.tag = "sim61-" + to_string(spec.direction);
  result.component = spec.component.value_or(
      static_cast<Index>(rng.below(static_cast<std::uint64_t>(config.n_components))));
  if (result.component < 0 || result.component >= config.n_components) {
    throw DataError("inject_fault: component out of range");
  }
  result.r = spec.r.value_or(spec.direction == FaultDirection::kIncrease ? rng.uniform(2.0, 10.0)
                                                                         : rng.uniform(0.1, 0.5));
  if (spec.n_f == 0) return result;

  std::vector<Index> candidates(static_cast<std::size_t>(slots));
  std::iota(candidates.begin(), candidates.end(), Index{1});
  rng.shuffle(std::span<Index>(candidates));
  for (Index n = 0; n < spec.n_f; ++n) {
    const Index dim = sim_index(config, result.component, candidates[static_cast<std::size_t>(n)]);
    result.record[dim] *= result.r;
    result.label.dims.push_back(dim);
  }
  std::sort(result.label.dims.begin(), result.label.dims.end());
  return result;
}

}  // namespace anomalens::data
