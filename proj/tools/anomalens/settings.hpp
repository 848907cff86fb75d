#pragma once

#include "anomalens/data/simulator.hpp"
#include "anomalens/eval/experiment_multimodal.hpp"
#include "anomalens/eval/experiment_nslkdd.hpp"
#include "anomalens/eval/experiment_sim61.hpp"
#include "anomalens/io/config.hpp"

namespace anomalens::cli {

// Config keys layered over library defaults. Seeds are set by the caller.

/// sim.components, sim.dims_per_component, sim.records, sim.beta, sim.gamma,
/// sim.base_mean, sim.base_std, sim.layout (interleaved | block).
data::SimConfig sim_config(const io::Config& cfg, data::SimConfig defaults);

/// sim61.runs, sim61.n_f, sim61.beta, sim61.gamma (paired lists),
/// sim61.direction (increase | decrease | random), sim61.hidden, train.*,
/// contribution.*.
eval::Sim61Params sim61_params(const io::Config& cfg, eval::Sim61Params defaults);

/// nslkdd.seeds, nslkdd.hidden, nslkdd.pca_components, nslkdd.top_k,
/// train.*, contribution.*.
eval::NslKddParams nslkdd_params(const io::Config& cfg, eval::NslKddParams defaults);

/// mm.* generator keys, mm.test_records, mm.code_sizes, mm.shared_size,
/// mae.pretrain.*, mae.inner.*, mae.finetune.*, mae.active_relu, baseline.*, events.* and sensitivity.*.
eval::MultimodalParams multimodal_params(const io::Config& cfg);

}  // namespace anomalens::cli
