#include "anomalens/detection/autoencoder_detector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "anomalens/error.hpp"

namespace anomalens::detection {

ActivationPlan ActivationPlan::uniform(std::size_t hidden_layers, nn::Activation hidden,
                                       nn::Activation output) {
  ActivationPlan plan;
  plan.layers.assign(hidden_layers, hidden);
  plan.layers.push_back(output);
  return plan;
}

std::pair<double, double> mean_and_std(std::span<const double> values) {
  if (values.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / static_cast<double>(values.size()))};
}

AutoencoderDetector::AutoencoderDetector(nn::DenseNetwork network, Normalizer normalizer,
                                         TrainingStats stats)
    : AutoencoderDetector(std::move(network), std::move(normalizer), stats,
                          stats.mse_mean + 3.0 * stats.mse_std) {}

AutoencoderDetector::AutoencoderDetector(nn::DenseNetwork network, Normalizer normalizer,
                                         TrainingStats stats, double threshold)
    : network_(std::move(network)),
      normalizer_(std::move(normalizer)),
      stats_(std::move(stats)),
      threshold_(threshold) {
  if (!network_.is_autoencoder()) throw DataError("detector: network is not autoencoder-shaped");
  if (normalizer_.dim() != network_.input_dim()) {
    throw DataError("detector: normalizer and network dimensions differ");
  }
  if (stats_.feature_mean.size() != input_dim() || stats_.feature_std.size() != input_dim()) {
    throw DataError("detector: training statistics have the wrong dimension");
  }
  set_threshold(threshold);
}

void AutoencoderDetector::set_threshold(double threshold) {
  if (!(threshold >= 0.0)) throw DataError("detector: threshold must be non-negative");
  threshold_ = threshold;
}

void AutoencoderDetector::check_input(const FeatureVector& raw) const {
  if (!trained()) throw DataError("detector: not trained");
  if (raw.size() != input_dim()) {
    throw DataError("detector: expected dimension " + std::to_string(input_dim()) + ", got " +
                    std::to_string(raw.size()));
  }
}

double AutoencoderDetector::score(const FeatureVector& raw) const {
  check_input(raw);
  return nn::reconstruction_mse(network_, normalizer_.apply(raw));
}

Vector AutoencoderDetector::score_batch(const Dataset& raw) const {
  Vector scores(raw.cols());
  for (Index c = 0; c < raw.cols(); ++c) scores[c] = score(raw.col(c));
  return scores;
}

Decision AutoencoderDetector::evaluate(const FeatureVector& raw) const {
  const double s = score(raw);
  return {s, s > threshold_};
}

Vector AutoencoderDetector::reconstruction_error(const FeatureVector& raw) const {
  check_input(raw);
  const Vector x = normalizer_.apply(raw);
  return network_.output(x) - x;
}

Vector AutoencoderDetector::outlier_degree(const FeatureVector& raw) const {
  check_input(raw);
  Vector degree(raw.size());
  for (Index i = 0; i < raw.size(); ++i) {
    const double diff = raw[i] - stats_.feature_mean[i];
    const double sd = stats_.feature_std[i];
    if (sd > 0.0) {
      degree[i] = diff / sd;
    } else if (diff == 0.0) {
      degree[i] = 0.0;
    } else {
      degree[i] = diff > 0.0 ? kOutlierSentinel : -kOutlierSentinel;
    }
  }
  return degree;
}

TrainingStats compute_training_stats(const nn::DenseNetwork& network, const Normalizer& normalizer,
                                     const Dataset& raw_train) {
  TrainingStats stats;
  const double t = static_cast<double>(raw_train.cols());
  stats.feature_mean = raw_train.rowwise().sum() / t;
  stats.feature_std = ((raw_train.colwise() - stats.feature_mean).array().square().rowwise().sum() / t)
                          .sqrt()
                          .matrix();
  Vector mses(raw_train.cols());
  for (Index c = 0; c < raw_train.cols(); ++c) {
    mses[c] = nn::reconstruction_mse(network, normalizer.apply(Vector(raw_train.col(c))));
  }
  std::tie(stats.mse_mean, stats.mse_std) =
      mean_and_std(std::span<const double>(mses.data(), static_cast<std::size_t>(mses.size())));
  return stats;
}

AutoencoderDetector train_detector(const Dataset& raw_train, nn::DenseNetwork initial,
                                   const nn::TrainConfig& config) {
  if (raw_train.cols() == 0) throw DataError("train_detector: empty training set");
  Normalizer normalizer = Normalizer::fit(raw_train);
  const Dataset normalized = normalizer.apply(raw_train);
  nn::TrainResult trained = nn::sgd_train(std::move(initial), normalized, config);
  TrainingStats stats = compute_training_stats(trained.network, normalizer, raw_train);
  return AutoencoderDetector(std::move(trained.network), std::move(normalizer), std::move(stats));
}

AutoencoderDetector train_detector(const Dataset& raw_train, std::span<const Index> hidden_sizes,
                                   const ActivationPlan& plan, const nn::TrainConfig& config) {
  const Index n = raw_train.rows();
  if (hidden_sizes.empty()) throw DataError("train_detector: at least one hidden layer required");
  if (plan.layers.size() != hidden_sizes.size() + 1) {
    throw DataError("train_detector: activation plan needs one entry per hidden layer plus output");
  }
  if (*std::min_element(hidden_sizes.begin(), hidden_sizes.end()) >= n) {
    throw DataError("train_detector: bottleneck width must be smaller than the input dimension");
  }
  std::vector<Index> widths(hidden_sizes.begin(), hidden_sizes.end());
  widths.push_back(n);
  Rng rng(derive_seed(config.seed, 0x1417));
  nn::DenseNetwork initial = nn::DenseNetwork::glorot(n, widths, plan.layers, rng);
  const bool center = plan.relu_bias == ActivationPlan::ReluBias::kActive;
  const bool mean_bias = plan.output_bias == ActivationPlan::OutputBias::kTrainingMean;
  const Dataset normalized =
      center || mean_bias ? Normalizer::fit(raw_train).apply(raw_train) : Dataset{};
  if (center) {
    Matrix a = normalized;
    for (std::size_t l = 0; l + 1 < initial.depth(); ++l) {
      nn::Layer& layer = initial.layer(l);
      if (layer.activation == nn::Activation::kRelu) {
        layer.biases = -(layer.weights * a).rowwise().minCoeff();
      }
      a = nn::affine_activate_batch(layer.weights, layer.biases, layer.activation, a);
    }
  }
  if (mean_bias) {
    const Vector mean = normalized.rowwise().mean();
    nn::Layer& out = initial.layer(initial.depth() - 1);
    for (Index i = 0; i < n; ++i) {
      const double m = mean[i];
      switch (out.activation) {
        case nn::Activation::kSigmoid: {
          const double p = std::clamp(m, 1e-6, 1.0 - 1e-6);
          out.biases[i] = std::log(p / (1.0 - p));
          break;
        }
        case nn::Activation::kRelu: out.biases[i] = std::max(m, 0.0); break;
        case nn::Activation::kIdentity: out.biases[i] = m; break;
      }
    }
  }
  return train_detector(raw_train, std::move(initial), config);
}

}  // namespace anomalens::detection
