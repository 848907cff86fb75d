#include "anomalens/contribution/attribution_metrics.hpp"

#include <algorithm>
#include <numeric>

namespace anomalens::contribution {

TopDimensions top_k_dimensions(const Vector& metric, std::size_t k) {
  std::vector<RankedDimension> all;
  all.reserve(static_cast<std::size_t>(metric.size()));
  for (Index i = 0; i < metric.size(); ++i) all.push_back({i, std::abs(metric[i])});
  const std::size_t keep = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(),
                    [](const RankedDimension& a, const RankedDimension& b) {
                      if (a.magnitude != b.magnitude) return a.magnitude > b.magnitude;
                      return a.index < b.index;
                    });
  all.resize(keep);
  TopDimensions top;
  top.nonzero = static_cast<std::size_t>(
      std::count_if(all.begin(), all.end(), [](const auto& d) { return d.magnitude > 0.0; }));
  top.entries = std::move(all);
  return top;
}

std::vector<Index> estimated_dimension_set(const Vector& metric) {
  std::vector<Index> chosen;
  if (metric.size() == 0) return chosen;
  const Vector magnitude = metric.cwiseAbs();
  const double mean = magnitude.mean();
  for (Index i = 0; i < magnitude.size(); ++i) {
    if (magnitude[i] > mean) chosen.push_back(i);
  }
  return chosen;
}

RecallPrecision recall_precision(std::span<const Index> estimated, std::span<const Index> actual) {
  std::vector<Index> est(estimated.begin(), estimated.end());
  std::vector<Index> act(actual.begin(), actual.end());
  std::sort(est.begin(), est.end());
  est.erase(std::unique(est.begin(), est.end()), est.end());
  std::sort(act.begin(), act.end());
  act.erase(std::unique(act.begin(), act.end()), act.end());
  std::vector<Index> hits;
  std::set_intersection(est.begin(), est.end(), act.begin(), act.end(), std::back_inserter(hits));
  RecallPrecision rp;
  if (!act.empty()) rp.recall = static_cast<double>(hits.size()) / static_cast<double>(act.size());
  if (!est.empty()) {
    rp.precision = static_cast<double>(hits.size()) / static_cast<double>(est.size());
  }
  return rp;
}

}  // namespace anomalens::contribution
