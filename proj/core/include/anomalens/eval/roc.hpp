#pragma once

#include <span>
#include <vector>

namespace anomalens::eval {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;  // records scoring >= threshold are flagged
};

/// Points from (0, 0) to (1, 1), one step per distinct score.
struct RocCurve {
  std::vector<RocPoint> points;
  double auroc = 0.0;
};

/// Sweeps the threshold down through the distinct scores (ties form a single
/// step) and integrates with the trapezoidal rule. Throws DataError unless
/// both classes are present.
RocCurve roc_auc(std::span<const double> scores, std::span<const bool> anomalous);

}  // namespace anomalens::eval
