#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace anomalens {

using Index = Eigen::Index;

/// One record: a fixed-length vector of real values, one slot per metric.
using FeatureVector = Eigen::VectorXd;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A dataset stored one record per column (N dims x T records), so each
/// record is contiguous in memory.
using Dataset = Eigen::MatrixXd;

}  // namespace anomalens
