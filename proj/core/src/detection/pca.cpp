#include "anomalens/detection/pca.hpp"

#include <algorithm>
#include <string>

#include <Eigen/Eigenvalues>

#include "anomalens/error.hpp"

namespace anomalens::detection {

PcaBaseline::PcaBaseline(Normalizer normalizer, Vector mean, Matrix components,
                         Vector explained_variance)
    : normalizer_(std::move(normalizer)),
      mean_(std::move(mean)),
      components_(std::move(components)),
      explained_variance_(std::move(explained_variance)) {
  if (normalizer_.dim() != mean_.size()) throw DataError("pca: normalizer/mean dimension mismatch");
  if (components_.rows() > 0 && components_.cols() != mean_.size()) {
    throw DataError("pca: component width differs from data dimension");
  }
  if (components_.rows() == 0) components_.resize(0, mean_.size());
  if (explained_variance_.size() != components_.rows()) {
    throw DataError("pca: one explained variance per component is required");
  }
}

PcaBaseline PcaBaseline::fit(const Dataset& raw_train, Index components) {
  if (raw_train.cols() == 0) throw DataError("pca: empty training set");
  const Index n = raw_train.rows();
  if (components < 0 || components > n) {
    throw DataError("pca: requested " + std::to_string(components) + " components for " +
                    std::to_string(n) + " dimensions");
  }
  Normalizer normalizer = Normalizer::fit(raw_train);
  const Dataset x = normalizer.apply(raw_train);
  const double t = static_cast<double>(x.cols());
  Vector mean = x.rowwise().sum() / t;
  const Matrix centered = x.colwise() - mean;
  Matrix covariance = Matrix::Zero(n, n);
  covariance.selfadjointView<Eigen::Lower>().rankUpdate(centered, 1.0 / t);
  covariance = covariance.selfadjointView<Eigen::Lower>();

  Eigen::SelfAdjointEigenSolver<Matrix> solver(covariance);
  if (solver.info() != Eigen::Success) throw NumericalError("pca: eigendecomposition failed");

  // Eigen returns ascending eigenvalues; keep the largest, fix each sign so
  // the largest-magnitude entry is positive.
  Matrix top(components, n);
  Vector variance(components);
  for (Index k = 0; k < components; ++k) {
    const Index source = n - 1 - k;
    Vector direction = solver.eigenvectors().col(source);
    Index pivot = 0;
    direction.cwiseAbs().maxCoeff(&pivot);
    if (direction[pivot] < 0.0) direction = -direction;
    top.row(k) = direction.transpose();
    variance[k] = std::max(0.0, solver.eigenvalues()[source]);
  }
  return PcaBaseline(std::move(normalizer), std::move(mean), std::move(top), std::move(variance));
}

double PcaBaseline::score(const FeatureVector& raw) const {
  const Vector centered = normalizer_.apply(raw) - mean_;
  const Vector coords = components_ * centered;
  const Vector residual = centered - components_.transpose() * coords;
  return residual.squaredNorm() / static_cast<double>(centered.size());
}

Vector PcaBaseline::score_batch(const Dataset& raw) const {
  Vector scores(raw.cols());
  for (Index c = 0; c < raw.cols(); ++c) scores[c] = score(raw.col(c));
  return scores;
}

}  // namespace anomalens::detection
