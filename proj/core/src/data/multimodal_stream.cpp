#include "anomalens/data/multimodal_stream.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <span>

#include "anomalens/error.hpp"
#include "anomalens/rng.hpp"

namespace anomalens::data {
namespace {

constexpr std::size_t kFlow = 0;
constexpr std::size_t kMib = 1;
constexpr std::size_t kSyslog = 2;

const char* const kFlowFeatures[] = {"flows", "packets", "bytes", "duration"};
const double kFlowScales[] = {1e2, 1e4, 1e6, 10.0};
const char* const kMibCounters[] = {"in_octets", "out_octets", "in_pkts", "cpu"};
const double kMibScales[] = {1e7, 1e7, 1e4, 50.0};

// AR(1) with stationary standard deviation `sd`.
struct Ar1 {
  double phi, sd, state;
  double step(Rng& rng) {
    state = phi * state + sd * std::sqrt(1.0 - phi * phi) * rng.normal();
    return state;
  }
};

std::vector<Index> pick(Rng& rng, Index population, Index count, Index offset = 0) {
  std::vector<Index> all(static_cast<std::size_t>(population));
  std::iota(all.begin(), all.end(), offset);
  rng.shuffle(std::span<Index>(all));
  all.resize(static_cast<std::size_t>(std::min(count, population)));
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

void MultimodalConfig::validate() const {
  if (records <= 0 || period <= 0) throw DataError("multimodal generator: records must be positive");
  if (flow_keys <= 0 || mib_nodes <= 0) throw DataError("multimodal generator: empty flow or MIB");
  if (heartbeat_templates < 0 || rare_templates < 0 ||
      syslog_templates <= heartbeat_templates + rare_templates) {
    throw DataError("multimodal generator: need regular syslog templates");
  }
  if (coupling < 0.0 || coupling > 1.0) throw DataError("multimodal generator: coupling in [0,1]");
  if (flow_noise < 0.0 || mib_noise < 0.0 || syslog_noise < 0.0 || rare_rate < 0.0) {
    throw DataError("multimodal generator: negative noise level");
  }
}

std::string to_string(FaultArchetype archetype) {
  switch (archetype) {
    case FaultArchetype::kVolumeFlood: return "volume_flood";
    case FaultArchetype::kCounterSpike: return "counter_spike";
    case FaultArchetype::kNovelTemplate: return "novel_template";
    case FaultArchetype::kTemplateBurst: return "template_burst";
    case FaultArchetype::kDecoupling: return "decoupling";
  }
  return "unknown";
}

FaultArchetype parse_fault_archetype(const std::string& text) {
  for (auto a : {FaultArchetype::kVolumeFlood, FaultArchetype::kCounterSpike,
                 FaultArchetype::kNovelTemplate, FaultArchetype::kTemplateBurst,
                 FaultArchetype::kDecoupling}) {
    if (to_string(a) == text) return a;
  }
  throw UsageError("unknown fault archetype '" + text + "'");
}

Dataset MultimodalStream::merged() const {
  Index rows = 0;
  for (const auto& d : types) rows += d.rows();
  Dataset out(rows, records());
  Index offset = 0;
  for (const auto& d : types) {
    out.middleRows(offset, d.rows()) = d;
    offset += d.rows();
  }
  return out;
}

MultimodalGenerator::MultimodalGenerator(MultimodalConfig config) : config_(config) {
  config_.validate();
  const std::vector<Index> sizes = type_sizes();
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    Rng rng(derive_seed(config_.readout_seed, 10 + k));
    Readout r;
    const Index n = sizes[k];
    r.scale = Vector::Ones(n);
    r.base = Vector::Zero(n);
    r.linear = Matrix::Zero(n, kLatentCount);
    r.quadratic = Matrix::Zero(n, kLatentCount);
    r.noise = k == kFlow ? config_.flow_noise : k == kMib ? config_.mib_noise : config_.syslog_noise;
    for (Index i = 0; i < n; ++i) {
      if (k == kFlow) r.scale[i] = kFlowScales[i % 4] * rng.uniform(0.5, 2.0);
      if (k == kMib) r.scale[i] = kMibScales[i % 4] * rng.uniform(0.5, 2.0);
      if (k == kSyslog) r.scale[i] = rng.uniform(1.0, 20.0);
      r.base[i] = rng.uniform(1.0, 2.0);
      r.linear(i, 0) = rng.uniform(0.3, 0.6);
      for (Index j = 1; j < kLatentCount; ++j) r.linear(i, j) = rng.uniform(-0.3, 0.3);
      for (Index j = 0; j < kLatentCount; ++j) r.quadratic(i, j) = rng.uniform(-0.5, 0.5);
    }
    readouts_.push_back(std::move(r));
  }
}

std::vector<Index> MultimodalGenerator::type_sizes() const {
  return {config_.flow_keys * 4, config_.mib_nodes * 4, config_.syslog_templates + 1};
}

Dataset MultimodalGenerator::latent_path(std::uint64_t stream) const {
  Rng rng(derive_seed(config_.seed, stream));
  Ar1 intensity{0.95, 0.25, 0.0}, mix1{0.98, 0.5, 0.0}, mix2{0.9, 0.5, 0.0};
  intensity.state = intensity.sd * rng.normal();
  mix1.state = mix1.sd * rng.normal();
  mix2.state = mix2.sd * rng.normal();
  Dataset path(kLatentCount, config_.records);
  for (Index t = 0; t < config_.records; ++t) {
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(t) /
                         static_cast<double>(config_.period);
    path(0, t) = 0.6 * std::sin(phase) + intensity.step(rng);
    path(1, t) = mix1.step(rng);
    path(2, t) = mix2.step(rng);
  }
  return path;
}

FeatureVector MultimodalGenerator::observe(std::size_t k, const Vector& latent, Index t) const {
  const Readout& r = readouts_.at(k);
  Rng rng(derive_seed(derive_seed(config_.seed, 100 + k), static_cast<std::uint64_t>(t)));
  const Index n = r.base.size();
  FeatureVector x(n);
  for (Index i = 0; i < n; ++i) {
    if (k == kSyslog) {
      const Index regular_start = config_.heartbeat_templates + config_.rare_templates;
      if (i == n - 1) {  // novel template slot
        x[i] = 0.0;
        continue;
      }
      if (i < config_.heartbeat_templates) {
        x[i] = std::round(r.scale[i]);
        continue;
      }
      if (i < regular_start) {
        x[i] = rng.bernoulli(config_.rare_rate) ? 1.0 : 0.0;
        continue;
      }
    }
    const double q = r.quadratic.row(i).dot(latent);
    const double mean = r.base[i] + r.linear.row(i).dot(latent) + config_.quadratic * q * q;
    double v = r.scale[i] * mean * (1.0 + r.noise * rng.normal());
    v = std::max(v, 0.0);
    if (k == kSyslog && config_.integer_counts) v = std::round(v);
    x[i] = v;
  }
  return x;
}

MultimodalStream MultimodalGenerator::generate() const {
  MultimodalStream s;
  s.type_names = {"flow", "mib", "syslog"};
  s.feature_names.resize(3);
  for (Index a = 0; a < config_.flow_keys; ++a) {
    for (const char* f : kFlowFeatures) {
      s.feature_names[0].push_back("flow_k" + std::to_string(a) + "_" + f);
    }
  }
  for (Index n = 0; n < config_.mib_nodes; ++n) {
    for (const char* c : kMibCounters) {
      s.feature_names[1].push_back("mib_n" + std::to_string(n) + "_" + c);
    }
  }
  for (Index j = 0; j < config_.syslog_templates; ++j) {
    s.feature_names[2].push_back("syslog_t" + std::to_string(j));
  }
  s.feature_names[2].push_back("syslog_novel");

  s.shared_latent = latent_path(0);
  const double c = config_.coupling;
  const double own = std::sqrt(std::max(0.0, 1.0 - c * c));
  const std::vector<Index> sizes = type_sizes();
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    Dataset latent = c * s.shared_latent;
    if (own > 0.0) latent += own * latent_path(1 + k);
    Dataset obs(sizes[k], config_.records);
    for (Index t = 0; t < config_.records; ++t) obs.col(t) = observe(k, latent.col(t), t);
    s.types.push_back(std::move(obs));
    s.type_latents.push_back(std::move(latent));
  }
  return s;
}

void MultimodalGenerator::inject(MultimodalStream& stream, const MultimodalFault& fault) const {
  const Index records = stream.records();
  if (fault.start < 0 || fault.duration <= 0 || fault.start + fault.duration > records) {
    throw DataError("multimodal fault window outside the stream");
  }
  Rng rng(fault.seed);
  MultimodalEvent event;
  event.start = fault.start;
  event.duration = fault.duration;
  event.archetype = fault.archetype;
  const Index end = fault.start + fault.duration;
  auto scale_dims = [&](std::size_t type, const std::vector<Index>& dims, double factor) {
    for (Index t = fault.start; t < end; ++t) {
      for (Index d : dims) stream.types[type](d, t) *= factor;
    }
    event.affected.push_back({type, dims});
  };

  switch (fault.archetype) {
    case FaultArchetype::kVolumeFlood: {
      const double factor = fault.magnitude > 0.0 ? fault.magnitude : 3.0;
      const auto keys = pick(rng, config_.flow_keys, fault.width > 0 ? fault.width : 2);
      std::vector<Index> flow_dims, mib_dims;
      for (Index a : keys) {
        for (Index f = 0; f < 3; ++f) flow_dims.push_back(a * 4 + f);
        const Index node = a % config_.mib_nodes;
        for (Index ctr : {Index{0}, Index{2}}) {
          if (std::find(mib_dims.begin(), mib_dims.end(), node * 4 + ctr) == mib_dims.end()) {
            mib_dims.push_back(node * 4 + ctr);
          }
        }
      }
      std::sort(mib_dims.begin(), mib_dims.end());
      scale_dims(kFlow, flow_dims, factor);
      scale_dims(kMib, mib_dims, factor);
      break;
    }
    case FaultArchetype::kCounterSpike: {
      const double factor = fault.magnitude > 0.0 ? fault.magnitude : 5.0;
      const Index node = static_cast<Index>(rng.below(static_cast<std::uint64_t>(config_.mib_nodes)));
      scale_dims(kMib, {node * 4, node * 4 + 1, node * 4 + 2}, factor);
      break;
    }
    case FaultArchetype::kNovelTemplate: {
      const double count = fault.magnitude > 0.0 ? fault.magnitude : 5.0;
      const Index slot = stream.types[kSyslog].rows() - 1;
      for (Index t = fault.start; t < end; ++t) stream.types[kSyslog](slot, t) += count;
      event.affected.push_back({kSyslog, {slot}});
      break;
    }
    case FaultArchetype::kTemplateBurst: {
      const double fraction = fault.magnitude > 0.0 ? fault.magnitude : 0.1;
      const Index regular_start = config_.heartbeat_templates + config_.rare_templates;
      const auto dims = pick(rng, config_.syslog_templates - regular_start,
                             fault.width > 0 ? fault.width : 4, regular_start);
      Dataset& syslog = stream.types[kSyslog];
      for (Index d : dims) {
        const double range = syslog.row(d).maxCoeff() - syslog.row(d).minCoeff();
        for (Index t = fault.start; t < end; ++t) syslog(d, t) += fraction * range;
      }
      event.affected.push_back({kSyslog, dims});
      break;
    }
    case FaultArchetype::kDecoupling: {
      const std::size_t k = fault.target_type;
      if (k >= stream.types.size()) throw DataError("decoupling fault: no such type");
      const Dataset other = latent_path(0x10000 + fault.seed);
      for (Index t = fault.start; t < end; ++t) {
        stream.types[k].col(t) = observe(k, other.col(t), t);
        stream.type_latents[k].col(t) = other.col(t);
      }
      std::vector<Index> all(static_cast<std::size_t>(stream.types[k].rows()));
      std::iota(all.begin(), all.end(), Index{0});
      event.affected.push_back({k, std::move(all)});
      break;
    }
  }
  stream.events.push_back(std::move(event));
}

}  // namespace anomalens::data
