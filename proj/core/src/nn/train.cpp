#include "anomalens/nn/train.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "anomalens/error.hpp"

namespace anomalens::nn {

EpochShuffler::EpochShuffler(std::size_t records, std::uint64_t seed)
    : order_(records), rng_(seed) {
  std::iota(order_.begin(), order_.end(), std::size_t{0});
}

const std::vector<std::size_t>& EpochShuffler::next_epoch() {
  rng_.shuffle(std::span<std::size_t>(order_));
  return order_;
}

Matrix gather_columns(const Dataset& data, std::span<const std::size_t> columns) {
  Matrix out(data.rows(), static_cast<Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out.col(static_cast<Index>(c)) = data.col(static_cast<Index>(columns[c]));
  }
  return out;
}

TrainResult sgd_train(DenseNetwork net, const Dataset& inputs, const Dataset& targets,
                      const TrainConfig& config) {
  if (net.empty()) throw DataError("sgd_train: network has no layers");
  if (inputs.cols() == 0) throw DataError("sgd_train: empty dataset");
  if (inputs.rows() != net.input_dim()) {
    throw DataError("sgd_train: records have " + std::to_string(inputs.rows()) +
                    " dims, network expects " + std::to_string(net.input_dim()));
  }
  if (targets.cols() != inputs.cols() || targets.rows() != net.output_dim()) {
    throw DataError("sgd_train: targets do not match inputs or network output");
  }
  if (config.batch_size == 0) throw DataError("sgd_train: batch size must be positive");
  if (!(config.learning_rate >= 0.0)) throw DataError("sgd_train: negative learning rate");

  const bool autoencoding = &inputs == &targets;
  const auto records = static_cast<std::size_t>(inputs.cols());
  const double out_dim = static_cast<double>(net.output_dim());
  const double lr = config.learning_rate;
  EpochShuffler shuffler(records, config.seed);

  // Buffers are reused across batches; only the short final batch resizes them.
  const std::size_t depth = net.depth();
  std::vector<Matrix> acts(depth + 1);
  Matrix target_batch, delta, upstream;
  Gradients grads;
  grads.weights.resize(depth);
  grads.biases.resize(depth);

  TrainResult result;
  result.epoch_loss.reserve(config.epochs);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const std::vector<std::size_t>& order = shuffler.next_epoch();
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < records; start += config.batch_size) {
      const std::size_t stop = std::min(records, start + config.batch_size);
      const auto batch = static_cast<Index>(stop - start);

      acts[0].resize(inputs.rows(), batch);
      for (Index c = 0; c < batch; ++c) acts[0].col(c) = inputs.col(static_cast<Index>(order[start + c]));
      for (std::size_t l = 0; l < depth; ++l) {
        const Layer& layer = net.layer(l);
        acts[l + 1].noalias() = layer.weights * acts[l];
        acts[l + 1].colwise() += layer.biases;
        activate(layer.activation, acts[l + 1]);
      }
      if (autoencoding) {
        delta = acts[depth] - acts[0];
      } else {
        target_batch.resize(targets.rows(), batch);
        for (Index c = 0; c < batch; ++c) {
          target_batch.col(c) = targets.col(static_cast<Index>(order[start + c]));
        }
        delta = acts[depth] - target_batch;
      }
      loss_sum += delta.squaredNorm() / (out_dim * static_cast<double>(batch));
      ++batches;

      delta *= 2.0 / (out_dim * static_cast<double>(batch));
      for (std::size_t l = depth; l-- > 0;) {
        const Layer& layer = net.layer(l);
        multiply_by_derivative(layer.activation, acts[l + 1], delta);
        grads.weights[l].noalias() = delta * acts[l].transpose();
        grads.biases[l].noalias() = delta.rowwise().sum();
        if (l > 0) {
          upstream.noalias() = layer.weights.transpose() * delta;
          delta.swap(upstream);
        }
      }
      for (std::size_t l = 0; l < depth; ++l) {
        Layer& layer = net.layer(l);
        grads.weights[l] += config.weight_decay * layer.weights;
        layer.weights -= lr * grads.weights[l];
        layer.biases -= lr * grads.biases[l];
      }
    }
    const double epoch_loss = loss_sum / static_cast<double>(batches);
    if (!std::isfinite(epoch_loss)) {
      throw NumericalError("sgd_train: loss diverged at epoch " + std::to_string(epoch + 1));
    }
    result.epoch_loss.push_back(epoch_loss);
  }
  result.network = std::move(net);
  return result;
}

TrainResult sgd_train(DenseNetwork net, const Dataset& data, const TrainConfig& config) {
  return sgd_train(std::move(net), data, data, config);
}

}  // namespace anomalens::nn
