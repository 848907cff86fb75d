#include "anomalens/multimodal/mae_training.hpp"

#include <cmath>
#include <string>

#include "anomalens/error.hpp"

namespace anomalens::multimodal {

namespace {

void check_data(const MaeNetwork& net, std::span<const Dataset> data) {
  const ModalitySchema& schema = net.schema();
  if (data.size() != schema.type_count()) {
    throw DataError("mae training: expected " + std::to_string(schema.type_count()) +
                    " datasets, got " + std::to_string(data.size()));
  }
  for (std::size_t k = 0; k < data.size(); ++k) {
    if (data[k].cols() == 0) throw DataError("mae training: type '" + schema.types[k].name + "' is empty");
    if (data[k].rows() != schema.types[k].input_size) {
      throw DataError("mae training: type '" + schema.types[k].name + "' has dimension " +
                      std::to_string(data[k].rows()) + ", expected " +
                      std::to_string(schema.types[k].input_size));
    }
    if (data[k].cols() != data[0].cols()) {
      throw DataError("mae training: all types need the same number of records");
    }
  }
}

void sgd_step(nn::Layer& layer, nn::Layer& grad, double lr, double weight_decay) {
  grad.weights += weight_decay * layer.weights;
  layer.weights -= lr * grad.weights;
  layer.biases -= lr * grad.biases;
}

void check_loss(double loss, std::size_t epoch, const char* stage) {
  if (!std::isfinite(loss)) {
    throw NumericalError(std::string(stage) + ": loss diverged at epoch " + std::to_string(epoch + 1));
  }
}

}  // namespace

std::vector<double> pretrain_outer(MaeNetwork& net, std::span<const Dataset> normalized,
                                   const nn::TrainConfig& config) {
  check_data(net, normalized);
  std::vector<double> final_loss;
  for (std::size_t k = 0; k < net.schema().type_count(); ++k) {
    const ModalityParams& start = net.params()[k];
    nn::DenseNetwork shallow({start.encoder, start.decoder});
    nn::TrainConfig type_config = config;
    type_config.seed = derive_seed(config.seed, 200 + k);
    nn::TrainResult trained = nn::sgd_train(std::move(shallow), normalized[k], type_config);
    ModalityParams& p = net.params(k);
    p.encoder = trained.network.layer(0);
    p.decoder = trained.network.layer(1);
    final_loss.push_back(trained.epoch_loss.empty() ? 0.0 : trained.epoch_loss.back());
  }
  return final_loss;
}

std::vector<double> pretrain_inner(MaeNetwork& net, std::span<const Dataset> normalized,
                                   const nn::TrainConfig& config) {
  check_data(net, normalized);
  const std::size_t k_count = net.schema().type_count();
  std::vector<Matrix> codes;
  for (std::size_t k = 0; k < k_count; ++k) {
    const nn::Layer& enc = net.params()[k].encoder;
    codes.push_back(nn::affine_activate_batch(enc.weights, enc.biases, enc.activation, normalized[k]));
  }
  const auto records = static_cast<std::size_t>(normalized[0].cols());
  if (config.batch_size == 0) throw DataError("pretrain_inner: batch size must be positive");
  nn::EpochShuffler shuffler(records, config.seed);
  const nn::Activation shared_act = net.schema().shared;

  std::vector<double> history;
  MaeGradients grads = zero_gradients(net);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto& order = shuffler.next_epoch();
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < records; start += config.batch_size) {
      const std::size_t stop = std::min(records, start + config.batch_size);
      const std::span<const std::size_t> ids(order.data() + start, stop - start);
      const double batch = static_cast<double>(ids.size());

      std::vector<Matrix> code_batch;
      for (std::size_t k = 0; k < k_count; ++k) code_batch.push_back(nn::gather_columns(codes[k], ids));
      const Matrix shared = net.fuse_batch(code_batch);

      Matrix shared_delta;
      double loss = 0.0;
      for (std::size_t k = 0; k < k_count; ++k) {
        const nn::Layer& def = net.params()[k].defusion;
        const Matrix defused = nn::affine_activate_batch(def.weights, def.biases, def.activation, shared);
        const Matrix residual = defused - code_batch[k];
        const double width = static_cast<double>(residual.rows());
        loss += residual.squaredNorm() / (width * batch);
        Matrix delta = (2.0 / (width * batch)) * residual;
        nn::multiply_by_derivative(def.activation, defused, delta);
        grads[k].defusion.weights.noalias() = delta * shared.transpose();
        grads[k].defusion.biases = delta.rowwise().sum();
        Matrix to_shared = def.weights.transpose() * delta;
        if (k == 0) {
          shared_delta = std::move(to_shared);
        } else {
          shared_delta += to_shared;
        }
      }
      nn::multiply_by_derivative(shared_act, shared, shared_delta);
      for (std::size_t k = 0; k < k_count; ++k) {
        grads[k].fusion.weights.noalias() = shared_delta * code_batch[k].transpose();
        grads[k].fusion.biases = shared_delta.rowwise().sum();
        ModalityParams& p = net.params(k);
        sgd_step(p.fusion, grads[k].fusion, config.learning_rate, config.weight_decay);
        sgd_step(p.defusion, grads[k].defusion, config.learning_rate, config.weight_decay);
      }
      loss_sum += loss;
      ++batches;
    }
    const double epoch_loss = loss_sum / static_cast<double>(batches);
    check_loss(epoch_loss, epoch, "pretrain_inner");
    history.push_back(epoch_loss);
  }
  return history;
}

std::vector<double> finetune(MaeNetwork& net, std::span<const Dataset> normalized,
                             const nn::TrainConfig& config, unsigned groups) {
  check_data(net, normalized);
  const std::size_t k_count = net.schema().type_count();
  const auto records = static_cast<std::size_t>(normalized[0].cols());
  if (config.batch_size == 0) throw DataError("finetune: batch size must be positive");
  nn::EpochShuffler shuffler(records, config.seed);

  std::vector<double> history;
  MaeGradients grads = zero_gradients(net);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto& order = shuffler.next_epoch();
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < records; start += config.batch_size) {
      const std::size_t stop = std::min(records, start + config.batch_size);
      const std::span<const std::size_t> ids(order.data() + start, stop - start);
      const double batch = static_cast<double>(ids.size());

      std::vector<Matrix> inputs;
      for (std::size_t k = 0; k < k_count; ++k) inputs.push_back(nn::gather_columns(normalized[k], ids));
      const MaeBatch cache = net.forward_batch(std::move(inputs));

      std::vector<Matrix> deltas(k_count);
      double loss = 0.0;
      for (std::size_t k = 0; k < k_count; ++k) {
        const Matrix residual = cache.outputs[k] - cache.inputs[k];
        const double width = static_cast<double>(residual.rows());
        loss += residual.squaredNorm() / (width * batch);
        deltas[k] = (2.0 / (width * batch)) * residual;
      }
      backpropagate(net, cache, std::move(deltas), &grads, nullptr);

      const double lr = config.learning_rate;
      const double wd = config.weight_decay;
      for (std::size_t k = 0; k < k_count; ++k) {
        ModalityParams& p = net.params(k);
        if (groups & kEncoders) sgd_step(p.encoder, grads[k].encoder, lr, wd);
        if (groups & kFusion) sgd_step(p.fusion, grads[k].fusion, lr, wd);
        if (groups & kDefusion) sgd_step(p.defusion, grads[k].defusion, lr, wd);
        if (groups & kDecoders) sgd_step(p.decoder, grads[k].decoder, lr, wd);
      }
      loss_sum += loss;
      ++batches;
    }
    const double epoch_loss = loss_sum / static_cast<double>(batches);
    check_loss(epoch_loss, epoch, "finetune");
    history.push_back(epoch_loss);
  }
  return history;
}

std::vector<Vector> per_type_mse(const MaeNetwork& net, std::span<const Dataset> normalized) {
  check_data(net, normalized);
  const std::size_t k_count = net.schema().type_count();
  const Index records = normalized[0].cols();
  std::vector<Vector> result(k_count, Vector(records));
  const std::vector<double> unit(k_count, 1.0);
  std::vector<Vector> inputs(k_count);
  std::vector<double> mse;
  for (Index t = 0; t < records; ++t) {
    for (std::size_t k = 0; k < k_count; ++k) inputs[k] = normalized[k].col(t);
    net.weighted_mse(inputs, unit, &mse, nullptr);
    for (std::size_t k = 0; k < k_count; ++k) result[k][t] = mse[k];
  }
  return result;
}

void activate_relu_biases(MaeNetwork& net, std::span<const Dataset> normalized, unsigned groups) {
  check_data(net, normalized);
  const std::size_t k_count = net.schema().type_count();
  if (groups & kEncoders) {
    for (std::size_t k = 0; k < k_count; ++k) {
      nn::Layer& enc = net.params(k).encoder;
      if (enc.activation == nn::Activation::kRelu) {
        enc.biases = -(enc.weights * normalized[k]).rowwise().minCoeff();
      }
    }
  }
  std::vector<Matrix> codes;
  for (std::size_t k = 0; k < k_count; ++k) {
    const nn::Layer& enc = net.params()[k].encoder;
    codes.push_back(nn::affine_activate_batch(enc.weights, enc.biases, enc.activation, normalized[k]));
  }
  if ((groups & kFusion) && net.schema().shared == nn::Activation::kRelu) {
    // The shared pre-activation sums every type's term, so the whole shift
    // goes into the first type's bias.
    Matrix pre = Matrix::Zero(net.schema().shared_size, normalized[0].cols());
    for (std::size_t k = 0; k < k_count; ++k) {
      nn::Layer& fus = net.params(k).fusion;
      fus.biases.setZero();
      pre.noalias() += fus.weights * codes[k];
    }
    net.params(0).fusion.biases = -pre.rowwise().minCoeff();
  }
  if (groups & kDefusion) {
    const Matrix shared = net.fuse_batch(codes);
    for (std::size_t k = 0; k < k_count; ++k) {
      nn::Layer& def = net.params(k).defusion;
      if (def.activation == nn::Activation::kRelu) {
        def.biases = -(def.weights * shared).rowwise().minCoeff();
      }
    }
  }
}

double joint_objective(const MaeNetwork& net, std::span<const Dataset> normalized) {
  const std::vector<Vector> mse = per_type_mse(net, normalized);
  double total = 0.0;
  for (const Vector& m : mse) total += m.mean();
  return total;
}

MaeNetwork train_mae_network(const ModalitySchema& schema, std::span<const Dataset> normalized,
                             const MaeTrainConfig& config) {
  Rng init(derive_seed(config.seed, 1));
  MaeNetwork net = MaeNetwork::glorot(schema, init);
  if (config.active_relu) activate_relu_biases(net, normalized);
  nn::TrainConfig finetune_config = config.finetune;
  finetune_config.seed = derive_seed(config.seed, 4);
  if (config.use_pretraining) {
    nn::TrainConfig outer = config.pretrain;
    outer.seed = derive_seed(config.seed, 2);
    pretrain_outer(net, normalized, outer);
    if (config.active_relu) activate_relu_biases(net, normalized, kFusion | kDefusion);
    nn::TrainConfig inner = config.inner.value_or(config.pretrain);
    inner.seed = derive_seed(config.seed, 3);
    pretrain_inner(net, normalized, inner);
  } else {
    finetune_config.epochs += config.pretrain.epochs;
  }
  finetune(net, normalized, finetune_config);
  return net;
}

}  // namespace anomalens::multimodal
