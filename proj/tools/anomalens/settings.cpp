#include "settings.hpp"

#include "anomalens/error.hpp"

namespace anomalens::cli {
namespace {

Index get_index(const io::Config& cfg, const std::string& key, Index fallback) {
  const auto v = cfg.get_int(key, fallback);
  if (v < 0) throw UsageError(key + " must be non-negative");
  return static_cast<Index>(v);
}

std::vector<Index> get_indices(const io::Config& cfg, const std::string& key,
                               const std::vector<Index>& fallback) {
  std::vector<double> defaults(fallback.begin(), fallback.end());
  std::vector<Index> out;
  for (double v : cfg.get_doubles(key, defaults)) {
    if (v < 1 || v != static_cast<double>(static_cast<Index>(v))) {
      throw UsageError(key + ": expected positive integers");
    }
    out.push_back(static_cast<Index>(v));
  }
  return out;
}

}  // namespace

data::SimConfig sim_config(const io::Config& cfg, data::SimConfig d) {
  d.n_components = get_index(cfg, "sim.components", d.n_components);
  d.dims_per_component = get_index(cfg, "sim.dims_per_component", d.dims_per_component);
  d.records = get_index(cfg, "sim.records", d.records);
  d.beta = cfg.get_double("sim.beta", d.beta);
  d.gamma = cfg.get_double("sim.gamma", d.gamma);
  d.base_mean = cfg.get_double("sim.base_mean", d.base_mean);
  d.base_std = cfg.get_double("sim.base_std", d.base_std);
  const auto layout = cfg.get_string("sim.layout", "interleaved");
  if (layout == "block") {
    d.layout = data::SimLayout::kBlock;
  } else if (layout != "interleaved") {
    throw UsageError("sim.layout must be 'interleaved' or 'block'");
  }
  return d;
}

eval::Sim61Params sim61_params(const io::Config& cfg, eval::Sim61Params p) {
  p.runs = get_index(cfg, "sim61.runs", static_cast<Index>(p.runs));
  p.n_f_values = get_indices(cfg, "sim61.n_f", p.n_f_values);
  std::vector<double> betas, gammas;
  for (const auto& [b, g] : p.beta_gamma) {
    betas.push_back(b);
    gammas.push_back(g);
  }
  betas = cfg.get_doubles("sim61.beta", betas);
  gammas = cfg.get_doubles("sim61.gamma", gammas);
  if (betas.size() != gammas.size()) throw UsageError("sim61.beta and sim61.gamma differ in length");
  p.beta_gamma.clear();
  for (std::size_t i = 0; i < betas.size(); ++i) p.beta_gamma.emplace_back(betas[i], gammas[i]);
  const auto direction = cfg.get_string("sim61.direction", "random");
  if (direction == "random") {
    p.direction.reset();
  } else {
    p.direction = data::parse_fault_direction(direction);
  }
  p.hidden = get_index(cfg, "sim61.hidden", p.hidden);
  p.train = io::train_config(cfg, "train", p.train);
  p.contribution = io::contribution_config(cfg, p.contribution);
  return p;
}

eval::NslKddParams nslkdd_params(const io::Config& cfg, eval::NslKddParams p) {
  p.seed_count = get_index(cfg, "nslkdd.seeds", static_cast<Index>(p.seed_count));
  p.hidden = get_index(cfg, "nslkdd.hidden", p.hidden);
  p.pca_components = get_index(cfg, "nslkdd.pca_components", p.pca_components);
  p.top_k = get_index(cfg, "nslkdd.top_k", static_cast<Index>(p.top_k));
  p.train = io::train_config(cfg, "train", p.train);
  p.contribution = io::contribution_config(cfg, p.contribution);
  return p;
}

eval::MultimodalParams multimodal_params(const io::Config& cfg) {
  eval::MultimodalParams p;
  auto& g = p.generator;
  g.records = get_index(cfg, "mm.records", g.records);
  g.period = get_index(cfg, "mm.period", g.period);
  g.flow_keys = get_index(cfg, "mm.flow_keys", g.flow_keys);
  g.mib_nodes = get_index(cfg, "mm.mib_nodes", g.mib_nodes);
  g.syslog_templates = get_index(cfg, "mm.syslog_templates", g.syslog_templates);
  g.coupling = cfg.get_double("mm.coupling", g.coupling);
  g.flow_noise = cfg.get_double("mm.flow_noise", g.flow_noise);
  g.mib_noise = cfg.get_double("mm.mib_noise", g.mib_noise);
  g.syslog_noise = cfg.get_double("mm.syslog_noise", g.syslog_noise);
  g.quadratic = cfg.get_double("mm.quadratic", g.quadratic);
  g.rare_rate = cfg.get_double("mm.rare_rate", g.rare_rate);
  g.integer_counts = cfg.get_bool("mm.integer_counts", g.integer_counts);
  g.readout_seed = cfg.get_u64("mm.readout_seed", g.readout_seed);
  g.validate();
  p.test_records = get_index(cfg, "mm.test_records", p.test_records);
  p.code_sizes = get_indices(cfg, "mm.code_sizes", p.code_sizes);
  p.shared_size = get_index(cfg, "mm.shared_size", p.shared_size);
  p.mae.pretrain = io::train_config(cfg, "mae.pretrain", p.mae.pretrain);
  p.mae.finetune = io::train_config(cfg, "mae.finetune", p.mae.finetune);
  p.mae.inner = io::train_config(cfg, "mae.inner", p.mae.inner.value_or(p.mae.pretrain));
  p.mae.active_relu = cfg.get_bool("mae.active_relu", p.mae.active_relu);
  p.baseline = io::train_config(cfg, "baseline", p.baseline);
  p.target_fpr = cfg.get_double("events.target_fpr", p.target_fpr);
  p.window = get_index(cfg, "events.window", p.window);
  p.fault_duration = get_index(cfg, "events.duration", p.fault_duration);
  p.faults_per_archetype =
      get_index(cfg, "events.per_archetype", static_cast<Index>(p.faults_per_archetype));
  p.sensitivity_trials =
      get_index(cfg, "sensitivity.trials", static_cast<Index>(p.sensitivity_trials));
  p.sensitivity_shift = cfg.get_double("sensitivity.shift", p.sensitivity_shift);
  p.sensitivity_width = get_index(cfg, "sensitivity.width", p.sensitivity_width);
  return p;
}

}  // namespace anomalens::cli
