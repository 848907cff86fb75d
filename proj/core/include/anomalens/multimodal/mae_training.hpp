#pragma once

#include <optional>
#include <span>
#include <vector>

#include "anomalens/multimodal/mae.hpp"
#include "anomalens/nn/train.hpp"

namespace anomalens::multimodal {

struct MaeTrainConfig {
  nn::TrainConfig pretrain{.epochs = 100, .batch_size = 50};
  nn::TrainConfig finetune{.epochs = 100, .batch_size = 50};
  /// Settings for pretrain_inner when they should differ from `pretrain`; the
  /// codes it reconstructs are not normalized and can need a smaller step.
  std::optional<nn::TrainConfig> inner;
  bool use_pretraining = true;
  /// Re-initialize relu biases from the training data before each stage that
  /// trains them (see activate_relu_biases). Off keeps the zero biases.
  bool active_relu = false;
  std::uint64_t seed = 0;  // initialization and every stage seed derive from it
};

/// Trains K independent shallow autoencoders N_k -> code_k -> N_k on the
/// normalized per-type data, starting from the network's current encoder and
/// decoder, and installs the results as encoder/decoder pairs.
/// Returns each type's final-epoch training loss.
std::vector<double> pretrain_outer(MaeNetwork& net, std::span<const Dataset> normalized,
                                   const nn::TrainConfig& config);

/// With encoders frozen, trains fusion and defusion to reconstruct the
/// per-type codes through the shared layer. Only fusion/defusion change.
/// Returns the per-epoch loss.
std::vector<double> pretrain_inner(MaeNetwork& net, std::span<const Dataset> normalized,
                                   const nn::TrainConfig& config);

/// Joint SGD over `groups` on mean_t sum_k ||x5_k - x_k||^2 / N_k plus
/// weight decay. Returns the per-epoch loss.
std::vector<double> finetune(MaeNetwork& net, std::span<const Dataset> normalized,
                             const nn::TrainConfig& config, unsigned groups = kAllGroups);

/// For every relu layer in `groups` (encoders, fusion, defusion), sets each
/// bias to minus the unit's smallest pre-activation over the training data,
/// so every unit starts active on every record. Layers are visited in forward
/// order so later inputs see the new biases.
void activate_relu_biases(MaeNetwork& net, std::span<const Dataset> normalized,
                        unsigned groups = kAllGroups);

/// mean_t sum_k MSE_k over the dataset (the fine-tuning objective without
/// weight decay).
double joint_objective(const MaeNetwork& net, std::span<const Dataset> normalized);

/// Per-type MSE for every record: result[k][t].
std::vector<Vector> per_type_mse(const MaeNetwork& net, std::span<const Dataset> normalized);

/// Full schedule: glorot init, then pretrain_outer + pretrain_inner with the
/// pretrain budget and finetune; without pretraining, finetune alone runs for
/// pretrain.epochs + finetune.epochs.
MaeNetwork train_mae_network(const ModalitySchema& schema, std::span<const Dataset> normalized,
                             const MaeTrainConfig& config);

}  // namespace anomalens::multimodal
