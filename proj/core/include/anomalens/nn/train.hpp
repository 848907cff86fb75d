#pragma once

#include <cstdint>
#include <vector>

#include "anomalens/nn/network.hpp"

namespace anomalens::nn {

struct TrainConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 50;
  double learning_rate = 0.01;
  double weight_decay = 1e-6;  // L2 coefficient on weights, biases excluded
  std::uint64_t seed = 0;      // drives the per-epoch shuffle
};

struct TrainResult {
  DenseNetwork network;
  std::vector<double> epoch_loss;  // mean minibatch loss seen during each epoch
};

/// Minibatch SGD on the mean reconstruction error against `targets`
/// (columns aligned with `inputs`), plus weight_decay * ||W||^2 / 2 per layer.
/// Records are reshuffled every epoch; a short final batch is kept. Throws
/// DataError on an empty or mismatched dataset and NumericalError naming the
/// epoch when the loss turns non-finite.
TrainResult sgd_train(DenseNetwork net, const Dataset& inputs, const Dataset& targets,
                      const TrainConfig& config);

/// Autoencoder training: the inputs are their own targets.
TrainResult sgd_train(DenseNetwork net, const Dataset& data, const TrainConfig& config);

/// Indices 0..n-1 in the order visited during `epoch`-th pass; shared by every
/// trainer so identical seeds yield identical batch sequences.
class EpochShuffler {
 public:
  EpochShuffler(std::size_t records, std::uint64_t seed);
  const std::vector<std::size_t>& next_epoch();

 private:
  std::vector<std::size_t> order_;
  Rng rng_;
};

/// Copies the listed columns of `data` into a new matrix.
Matrix gather_columns(const Dataset& data, std::span<const std::size_t> columns);

}  // namespace anomalens::nn
