#pragma once

#include <span>
#include <vector>

#include "anomalens/detection/normalizer.hpp"
#include "anomalens/nn/network.hpp"
#include "anomalens/nn/train.hpp"

namespace anomalens::detection {

/// Activation for every layer after the input, hidden layers first, output
/// last.
struct ActivationPlan {
  std::vector<nn::Activation> layers;
  /// Output-layer bias at initialization. kTrainingMean starts every output
  /// unit at the normalized training mean (through the inverse activation),
  /// which keeps wide sigmoid networks from saturating their hidden layer in
  /// the first epochs.
  enum class OutputBias { kZero, kTrainingMean } output_bias = OutputBias::kZero;
  /// Hidden relu biases at initialization. kActive sets each bias to minus the
  /// smallest pre-activation over the training data, so every unit starts
  /// active on every record. Zero biases on non-negative inputs leave units
  /// whose weight rows lean negative dead from the first step.
  enum class ReluBias { kZero, kActive } relu_bias = ReluBias::kZero;

  static ActivationPlan uniform(std::size_t hidden_layers, nn::Activation hidden,
                                nn::Activation output);
};

/// Statistics captured from the training set.
struct TrainingStats {
  Vector feature_mean;  // raw units, per dimension
  Vector feature_std;   // raw units, population standard deviation
  double mse_mean = 0.0;
  double mse_std = 0.0;
};

struct Decision {
  double score = 0.0;
  bool anomalous = false;
};

/// Sentinel magnitude used by outlier_degree when a dimension had zero
/// variance in training and the test value differs from the training mean.
inline constexpr double kOutlierSentinel = 1e9;

/// Autoencoder anomaly detector scoring raw records by reconstruction MSE in
/// normalized space. Immutable after construction apart from set_threshold.
class AutoencoderDetector {
 public:
  AutoencoderDetector() = default;
  AutoencoderDetector(nn::DenseNetwork network, Normalizer normalizer, TrainingStats stats);
  AutoencoderDetector(nn::DenseNetwork network, Normalizer normalizer, TrainingStats stats,
                      double threshold);

  bool trained() const noexcept { return !network_.empty(); }
  Index input_dim() const noexcept { return network_.input_dim(); }
  const nn::DenseNetwork& network() const noexcept { return network_; }
  const Normalizer& normalizer() const noexcept { return normalizer_; }
  const TrainingStats& stats() const noexcept { return stats_; }

  /// mse_mean + 3 * mse_std unless overridden.
  double threshold() const noexcept { return threshold_; }
  void set_threshold(double threshold);

  /// Reconstruction MSE of a raw record (normalized once, internally).
  double score(const FeatureVector& raw) const;
  Vector score_batch(const Dataset& raw) const;

  /// score > threshold (strict).
  Decision evaluate(const FeatureVector& raw) const;
  bool is_anomalous(const FeatureVector& raw) const { return evaluate(raw).anomalous; }

  /// Signed per-dimension x^(L)_i - x_i in normalized units.
  Vector reconstruction_error(const FeatureVector& raw) const;

  /// Per-dimension z-score of the raw record against the training mean/std.
  Vector outlier_degree(const FeatureVector& raw) const;

 private:
  void check_input(const FeatureVector& raw) const;

  nn::DenseNetwork network_;
  Normalizer normalizer_;
  TrainingStats stats_;
  double threshold_ = 0.0;
};

/// Fits the normalizer, trains `input -> hidden_sizes... -> input` on the
/// normalized records by SGD and calibrates the threshold on the training
/// MSEs. `plan` needs hidden_sizes.size() + 1 entries.
AutoencoderDetector train_detector(const Dataset& raw_train, std::span<const Index> hidden_sizes,
                                   const ActivationPlan& plan, const nn::TrainConfig& config);

/// Same, starting from an explicit network.
AutoencoderDetector train_detector(const Dataset& raw_train, nn::DenseNetwork initial,
                                   const nn::TrainConfig& config);

/// Stats for an already trained network: feature stats from raw data and
/// MSE stats from the network on normalized data.
TrainingStats compute_training_stats(const nn::DenseNetwork& network, const Normalizer& normalizer,
                                     const Dataset& raw_train);

/// Mean and population standard deviation.
std::pair<double, double> mean_and_std(std::span<const double> values);

}  // namespace anomalens::detection
