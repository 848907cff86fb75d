#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "anomalens/types.hpp"

namespace anomalens::data {

/// Synthetic cross-domain telemetry: flow, MIB and syslog streams driven by
/// common latent factors (traffic intensity plus two service-mix factors).
///
/// Each type reads its latent vector l_k = c * shared + sqrt(1 - c^2) * own_k
/// where c is `coupling`; per-dimension values are
///   scale * (base + a . l_k + quadratic * (q . l_k)^2) * (1 + noise_k * eps)
/// clamped at zero. Syslog additionally has constant heartbeat templates,
/// rare Bernoulli templates and a "novel" template that is zero unless a
/// fault writes to it.
struct MultimodalConfig {
  Index records = 2000;
  Index period = 288;  // bins per diurnal cycle

  Index flow_keys = 8;  // x 4 features (flows, packets, bytes, duration)
  Index mib_nodes = 4;  // x 4 counters (in_octets, out_octets, in_pkts, cpu)
  Index syslog_templates = 67;  // plus one novel-template slot
  Index heartbeat_templates = 3;
  Index rare_templates = 4;

  double coupling = 1.0;
  double flow_noise = 0.08;
  double mib_noise = 0.03;
  double syslog_noise = 0.005;
  double quadratic = 0.0;
  double rare_rate = 0.002;
  bool integer_counts = false;  // round syslog counts

  std::uint64_t seed = 0;  // latent paths and noise
  std::uint64_t readout_seed = 0x5eed;  // readout coefficients (the "network")

  void validate() const;
};

inline constexpr Index kLatentCount = 3;

enum class FaultArchetype {
  kVolumeFlood,    // flow and MIB volume features of a few keys/nodes scale up
  kCounterSpike,   // one MIB node's counters jump
  kNovelTemplate,  // only the syslog novel-template slot becomes nonzero
  kTemplateBurst,  // a few regular syslog templates shift by a fraction of their range
  kDecoupling,     // one type follows an unrelated latent path
};

std::string to_string(FaultArchetype archetype);
FaultArchetype parse_fault_archetype(const std::string& text);

struct TypedDims {
  std::size_t type = 0;
  std::vector<Index> dims;
};

struct MultimodalEvent {
  Index start = 0;     // first affected bin
  Index duration = 1;  // affected bins
  FaultArchetype archetype = FaultArchetype::kVolumeFlood;
  std::vector<TypedDims> affected;
};

struct MultimodalFault {
  FaultArchetype archetype = FaultArchetype::kVolumeFlood;
  Index start = 0;
  Index duration = 1;
  /// Multiplier for flood/spike, count for novel templates, fraction of the
  /// normal range for template bursts. Zero picks the archetype default.
  double magnitude = 0.0;
  Index width = 0;  // keys, templates, ...; zero picks the default
  std::size_t target_type = 1;  // decoupling only
  std::uint64_t seed = 0;
};

struct MultimodalStream {
  std::vector<std::string> type_names;             // flow, mib, syslog
  std::vector<Dataset> types;                      // one record per column
  std::vector<std::vector<std::string>> feature_names;
  Dataset shared_latent;                           // kLatentCount x records
  std::vector<Dataset> type_latents;               // what each type observed
  std::vector<MultimodalEvent> events;

  Index records() const noexcept { return types.empty() ? 0 : types.front().cols(); }
  /// Types stacked into one vector per record.
  Dataset merged() const;
};

class MultimodalGenerator {
 public:
  explicit MultimodalGenerator(MultimodalConfig config);

  const MultimodalConfig& config() const noexcept { return config_; }
  std::vector<Index> type_sizes() const;

  /// Fault-free stream. A pure function of the config.
  MultimodalStream generate() const;

  /// Applies a fault in place and appends its label.
  void inject(MultimodalStream& stream, const MultimodalFault& fault) const;

  /// Observation of type k at bin t for an explicit latent vector.
  FeatureVector observe(std::size_t k, const Vector& latent, Index t) const;

 private:
  struct Readout {
    Vector scale, base;
    Matrix linear;     // dims x kLatentCount
    Matrix quadratic;  // dims x kLatentCount
    double noise = 0.0;
  };

  Dataset latent_path(std::uint64_t stream) const;

  MultimodalConfig config_;
  std::vector<Readout> readouts_;
};

}  // namespace anomalens::data
