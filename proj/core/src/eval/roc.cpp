#include "anomalens/eval/roc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "anomalens/error.hpp"

namespace anomalens::eval {

RocCurve roc_auc(std::span<const double> scores, std::span<const bool> anomalous) {
  if (scores.size() != anomalous.size()) throw DataError("roc: scores and labels differ in length");
  std::size_t positives = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (std::isnan(scores[i])) throw DataError("roc: NaN score");
    positives += anomalous[i] ? 1 : 0;
  }
  const std::size_t negatives = scores.size() - positives;
  if (positives == 0 || negatives == 0) throw DataError("roc: need both normal and anomalous records");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0, scores[order.front()]});
  const double p = static_cast<double>(positives);
  const double n = static_cast<double>(negatives);
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == s; ++i) {
      if (anomalous[order[i]]) ++tp; else ++fp;
    }
    const RocPoint& prev = curve.points.back();
    RocPoint next{static_cast<double>(fp) / n, static_cast<double>(tp) / p, s};
    curve.auroc += (next.fpr - prev.fpr) * (next.tpr + prev.tpr) / 2.0;
    curve.points.push_back(next);
  }
  return curve;
}

}  // namespace anomalens::eval
