#pragma once

#include "anomalens/types.hpp"

namespace anomalens::detection {

/// Per-dimension min/max scaling fitted on training data.
///
/// apply(x) = (x - min) / (max - min), with no clamping, so test values
/// outside the training range land outside [0, 1]. A dimension that was
/// constant in training (min == max) always maps to 0.
class Normalizer {
 public:
  Normalizer() = default;
  Normalizer(Vector min, Vector max);

  /// Fits on a dataset stored one record per column. Throws DataError on an
  /// empty dataset.
  static Normalizer fit(const Dataset& train);

  Index dim() const noexcept { return min_.size(); }
  const Vector& min() const noexcept { return min_; }
  const Vector& max() const noexcept { return max_; }

  Vector apply(const Vector& x) const;
  Dataset apply(const Dataset& data) const;

  /// Inverse map; constant dimensions return their training value.
  Vector invert(const Vector& normalized) const;

  /// Converts a displacement in normalized units back to raw units.
  Vector scale_displacement(const Vector& normalized_delta) const;

 private:
  Vector min_;
  Vector max_;
};

}  // namespace anomalens::detection
