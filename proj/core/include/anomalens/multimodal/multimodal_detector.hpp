#pragma once

#include <span>
#include <vector>

#include "anomalens/contribution/contribution.hpp"
#include "anomalens/detection/autoencoder_detector.hpp"
#include "anomalens/detection/normalizer.hpp"
#include "anomalens/multimodal/mae_training.hpp"

namespace anomalens::multimodal {

/// Floor applied to each learnability value before inverting it.
inline constexpr double kMinLearnability = 1e-12;

/// w_k = (1/nu_k) / sum_j (1/nu_j), nu floored at kMinLearnability.
Vector learnability_weights(std::span<const double> nu);

struct MaeScore {
  double wmse = 0.0;
  std::vector<double> per_type_mse;
};

/// Multimodal detector: MAE parameters plus per-type normalizers,
/// learnability nu_k (mean training MSE of type k), weights w_k and the wMSE
/// threshold mean + 3 * std over the training records.
class MultimodalDetector {
 public:
  MultimodalDetector() = default;
  MultimodalDetector(MaeNetwork network, std::vector<detection::Normalizer> normalizers, Vector nu,
                     double wmse_mean, double wmse_std, double threshold);

  /// Computes nu, weights and threshold from the raw training data.
  static MultimodalDetector calibrate(MaeNetwork network,
                                      std::vector<detection::Normalizer> normalizers,
                                      std::span<const Dataset> raw_train);

  bool trained() const noexcept { return !network_.empty(); }
  std::size_t type_count() const noexcept { return normalizers_.size(); }
  const MaeNetwork& network() const noexcept { return network_; }
  const ModalitySchema& schema() const noexcept { return network_.schema(); }
  const std::vector<detection::Normalizer>& normalizers() const noexcept { return normalizers_; }
  const Vector& nu() const noexcept { return nu_; }
  const Vector& weights() const noexcept { return weights_; }
  double wmse_mean() const noexcept { return wmse_mean_; }
  double wmse_std() const noexcept { return wmse_std_; }
  double threshold() const noexcept { return threshold_; }
  void set_threshold(double threshold);

  MaeScore score(std::span<const FeatureVector> raw) const;
  detection::Decision evaluate(std::span<const FeatureVector> raw) const;

  /// Normalizes each type and concatenates in schema order.
  Vector normalize_concatenated(std::span<const FeatureVector> raw) const;
  /// Splits a concatenated vector back into per-type pieces.
  std::vector<Vector> split(const Vector& concatenated) const;

 private:
  MaeNetwork network_;
  std::vector<detection::Normalizer> normalizers_;
  Vector nu_;
  Vector weights_;
  double wmse_mean_ = 0.0;
  double wmse_std_ = 0.0;
  double threshold_ = 0.0;
};

/// Fits per-type normalizers, trains the MAE and calibrates the detector.
MultimodalDetector train_multimodal(std::span<const Dataset> raw_train,
                                    const ModalitySchema& schema, const MaeTrainConfig& config);

/// wMSE over the concatenated normalized input, for the contribution solver.
contribution::SmoothScore multimodal_score(const MultimodalDetector& detector);

struct MultimodalContribution {
  contribution::ContributionResult combined;           // eta over the concatenated input
  std::vector<contribution::ContributionResult> per_type;  // slices of combined
};

/// Contribution degree against the wMSE, with mse_stop defaulting to the
/// wMSE threshold.
MultimodalContribution mae_estimate_contribution(const MultimodalDetector& detector,
                                                 std::span<const FeatureVector> raw,
                                                 const contribution::ContributionConfig& config = {});

}  // namespace anomalens::multimodal
