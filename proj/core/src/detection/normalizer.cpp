#include "anomalens/detection/normalizer.hpp"

#include <string>

#include "anomalens/error.hpp"

namespace anomalens::detection {

Normalizer::Normalizer(Vector min, Vector max) : min_(std::move(min)), max_(std::move(max)) {
  if (min_.size() != max_.size()) throw DataError("normalizer: min/max length mismatch");
  for (Index i = 0; i < min_.size(); ++i) {
    if (!(min_[i] <= max_[i])) {
      throw DataError("normalizer: min exceeds max in dimension " + std::to_string(i));
    }
  }
}

Normalizer Normalizer::fit(const Dataset& train) {
  if (train.cols() == 0 || train.rows() == 0) throw DataError("normalizer: empty training set");
  return Normalizer(train.rowwise().minCoeff(), train.rowwise().maxCoeff());
}

Vector Normalizer::apply(const Vector& x) const {
  if (x.size() != dim()) {
    throw DataError("normalizer: expected dimension " + std::to_string(dim()) + ", got " +
                    std::to_string(x.size()));
  }
  Vector out(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double range = max_[i] - min_[i];
    out[i] = range > 0.0 ? (x[i] - min_[i]) / range : 0.0;
  }
  return out;
}

Dataset Normalizer::apply(const Dataset& data) const {
  if (data.rows() != dim()) {
    throw DataError("normalizer: expected dimension " + std::to_string(dim()) + ", got " +
                    std::to_string(data.rows()));
  }
  Dataset out(data.rows(), data.cols());
  for (Index c = 0; c < data.cols(); ++c) out.col(c) = apply(Vector(data.col(c)));
  return out;
}

Vector Normalizer::invert(const Vector& normalized) const {
  if (normalized.size() != dim()) throw DataError("normalizer: dimension mismatch in invert");
  return min_ + normalized.cwiseProduct(max_ - min_);
}

Vector Normalizer::scale_displacement(const Vector& normalized_delta) const {
  if (normalized_delta.size() != dim()) {
    throw DataError("normalizer: dimension mismatch in scale_displacement");
  }
  return normalized_delta.cwiseProduct(max_ - min_);
}

}  // namespace anomalens::detection
