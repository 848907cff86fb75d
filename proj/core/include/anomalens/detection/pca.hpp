#pragma once

#include "anomalens/detection/normalizer.hpp"

namespace anomalens::detection {

/// Linear baseline: reconstruction error after projecting the normalized,
/// mean-centered record onto the top principal directions of the training
/// covariance.
class PcaBaseline {
 public:
  PcaBaseline() = default;
  PcaBaseline(Normalizer normalizer, Vector mean, Matrix components, Vector explained_variance);

  /// Keeps the top `components` eigenvectors (0 <= components <= N) of the
  /// sample covariance of the normalized training data. Throws DataError if
  /// `components` exceeds the dimension or the set is empty.
  static PcaBaseline fit(const Dataset& raw_train, Index components);

  Index dim() const noexcept { return mean_.size(); }
  Index component_count() const noexcept { return components_.rows(); }
  const Normalizer& normalizer() const noexcept { return normalizer_; }
  const Vector& mean() const noexcept { return mean_; }
  /// m x N, orthonormal rows, descending variance.
  const Matrix& components() const noexcept { return components_; }
  const Vector& explained_variance() const noexcept { return explained_variance_; }

  /// (1/N) * ||c - P^T P c||^2 with c the centered, normalized record.
  double score(const FeatureVector& raw) const;
  Vector score_batch(const Dataset& raw) const;

 private:
  Normalizer normalizer_;
  Vector mean_;
  Matrix components_;
  Vector explained_variance_;
};

}  // namespace anomalens::detection
