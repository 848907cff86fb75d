#include "anomalens/multimodal/multimodal_detector.hpp"

#include <algorithm>
#include <string>

#include "anomalens/error.hpp"

namespace anomalens::multimodal {

Vector learnability_weights(std::span<const double> nu) {
  if (nu.empty()) throw DataError("learnability weights: no data types");
  Vector inverse(static_cast<Index>(nu.size()));
  for (std::size_t k = 0; k < nu.size(); ++k) {
    if (!(nu[k] >= 0.0)) throw DataError("learnability weights: nu must be non-negative");
    inverse[static_cast<Index>(k)] = 1.0 / std::max(nu[k], kMinLearnability);
  }
  return inverse / inverse.sum();
}

MultimodalDetector::MultimodalDetector(MaeNetwork network,
                                       std::vector<detection::Normalizer> normalizers, Vector nu,
                                       double wmse_mean, double wmse_std, double threshold)
    : network_(std::move(network)),
      normalizers_(std::move(normalizers)),
      nu_(std::move(nu)),
      wmse_mean_(wmse_mean),
      wmse_std_(wmse_std) {
  const ModalitySchema& schema = network_.schema();
  if (normalizers_.size() != schema.type_count() ||
      nu_.size() != static_cast<Index>(schema.type_count())) {
    throw DataError("multimodal detector: one normalizer and nu per data type is required");
  }
  for (std::size_t k = 0; k < normalizers_.size(); ++k) {
    if (normalizers_[k].dim() != schema.types[k].input_size) {
      throw DataError("multimodal detector: normalizer for '" + schema.types[k].name +
                      "' has the wrong dimension");
    }
  }
  weights_ = learnability_weights(std::span<const double>(nu_.data(), nu_.size()));
  set_threshold(threshold);
}

MultimodalDetector MultimodalDetector::calibrate(MaeNetwork network,
                                                 std::vector<detection::Normalizer> normalizers,
                                                 std::span<const Dataset> raw_train) {
  const std::size_t k_count = network.schema().type_count();
  if (raw_train.size() != k_count || normalizers.size() != k_count) {
    throw DataError("multimodal detector: one dataset and normalizer per data type is required");
  }
  std::vector<Dataset> normalized;
  for (std::size_t k = 0; k < k_count; ++k) normalized.push_back(normalizers[k].apply(raw_train[k]));
  const std::vector<Vector> mse = per_type_mse(network, normalized);

  std::vector<double> nu(k_count);
  for (std::size_t k = 0; k < k_count; ++k) nu[k] = mse[k].mean();
  const Vector w = learnability_weights(nu);

  const Index records = mse.front().size();
  std::vector<double> wmse(static_cast<std::size_t>(records));
  for (Index t = 0; t < records; ++t) {
    double total = w[0] * mse[0][t];
    for (std::size_t k = 1; k < k_count; ++k) total += w[static_cast<Index>(k)] * mse[k][t];
    wmse[static_cast<std::size_t>(t)] = total;
  }
  const auto [mean, sd] = detection::mean_and_std(wmse);
  Vector nu_vec = Eigen::Map<const Vector>(nu.data(), static_cast<Index>(k_count));
  return MultimodalDetector(std::move(network), std::move(normalizers), std::move(nu_vec), mean, sd,
                            mean + 3.0 * sd);
}

void MultimodalDetector::set_threshold(double threshold) {
  if (!(threshold >= 0.0)) throw DataError("multimodal detector: threshold must be non-negative");
  threshold_ = threshold;
}

MaeScore MultimodalDetector::score(std::span<const FeatureVector> raw) const {
  if (!trained()) throw DataError("multimodal detector: not trained");
  if (raw.size() != type_count()) {
    throw DataError("multimodal detector: expected " + std::to_string(type_count()) +
                    " inputs, got " + std::to_string(raw.size()));
  }
  std::vector<Vector> inputs;
  for (std::size_t k = 0; k < raw.size(); ++k) inputs.push_back(normalizers_[k].apply(raw[k]));
  MaeScore s;
  s.wmse = network_.weighted_mse(inputs, std::span<const double>(weights_.data(), weights_.size()),
                                 &s.per_type_mse, nullptr);
  return s;
}

detection::Decision MultimodalDetector::evaluate(std::span<const FeatureVector> raw) const {
  const double s = score(raw).wmse;
  return {s, s > threshold_};
}

Vector MultimodalDetector::normalize_concatenated(std::span<const FeatureVector> raw) const {
  if (raw.size() != type_count()) throw DataError("multimodal detector: wrong number of inputs");
  Vector out(schema().total_input());
  const std::vector<Index> offsets = schema().input_offsets();
  for (std::size_t k = 0; k < raw.size(); ++k) {
    out.segment(offsets[k], schema().types[k].input_size) = normalizers_[k].apply(raw[k]);
  }
  return out;
}

std::vector<Vector> MultimodalDetector::split(const Vector& concatenated) const {
  if (concatenated.size() != schema().total_input()) {
    throw DataError("multimodal detector: concatenated input has the wrong length");
  }
  std::vector<Vector> parts;
  const std::vector<Index> offsets = schema().input_offsets();
  for (std::size_t k = 0; k < type_count(); ++k) {
    parts.push_back(concatenated.segment(offsets[k], schema().types[k].input_size));
  }
  return parts;
}

MultimodalDetector train_multimodal(std::span<const Dataset> raw_train,
                                    const ModalitySchema& schema, const MaeTrainConfig& config) {
  schema.validate();
  if (raw_train.size() != schema.type_count()) {
    throw DataError("train_multimodal: one dataset per data type is required");
  }
  std::vector<detection::Normalizer> normalizers;
  std::vector<Dataset> normalized;
  for (std::size_t k = 0; k < raw_train.size(); ++k) {
    normalizers.push_back(detection::Normalizer::fit(raw_train[k]));
    normalized.push_back(normalizers.back().apply(raw_train[k]));
  }
  MaeNetwork net = train_mae_network(schema, normalized, config);
  return MultimodalDetector::calibrate(std::move(net), std::move(normalizers), raw_train);
}

contribution::SmoothScore multimodal_score(const MultimodalDetector& detector) {
  if (!detector.trained()) throw DataError("contribution: multimodal detector is not trained");
  const MultimodalDetector* det = &detector;
  auto evaluate = [det](const Vector& z, Vector* gradient) {
    const std::vector<Vector> parts = det->split(z);
    const Vector& w = det->weights();
    const std::span<const double> weights(w.data(), static_cast<std::size_t>(w.size()));
    if (gradient == nullptr) return det->network().weighted_mse(parts, weights, nullptr, nullptr);
    std::vector<Vector> grads;
    const double value = det->network().weighted_mse(parts, weights, nullptr, &grads);
    if (grads.size() == 1) {
      *gradient = std::move(grads.front());
    } else {
      gradient->resize(z.size());
      Index offset = 0;
      for (const Vector& g : grads) {
        gradient->segment(offset, g.size()) = g;
        offset += g.size();
      }
    }
    return value;
  };
  return contribution::SmoothScore{
      [evaluate](const Vector& z) { return evaluate(z, nullptr); },
      [evaluate](const Vector& z, Vector& gradient) { return evaluate(z, &gradient); }};
}

MultimodalContribution mae_estimate_contribution(const MultimodalDetector& detector,
                                                 std::span<const FeatureVector> raw,
                                                 const contribution::ContributionConfig& config) {
  const contribution::SmoothScore score = multimodal_score(detector);
  const Vector x = detector.normalize_concatenated(raw);
  MultimodalContribution out;
  out.combined =
      contribution::sweep_lambdas(score, x, config, config.mse_stop.value_or(detector.threshold()));

  const std::vector<Vector> eta_parts = detector.split(out.combined.eta);
  const std::vector<Vector> x_parts = detector.split(x);
  std::vector<Vector> amended;
  for (std::size_t k = 0; k < eta_parts.size(); ++k) amended.push_back(x_parts[k] - eta_parts[k]);
  std::vector<double> per_type_mse;
  const std::vector<double> unit(eta_parts.size(), 1.0);
  detector.network().weighted_mse(amended, unit, &per_type_mse, nullptr);
  for (std::size_t k = 0; k < eta_parts.size(); ++k) {
    contribution::ContributionResult part = out.combined;
    part.eta = eta_parts[k];
    part.final_mse = per_type_mse[k];
    out.per_type.push_back(std::move(part));
  }
  return out;
}

}  // namespace anomalens::multimodal
