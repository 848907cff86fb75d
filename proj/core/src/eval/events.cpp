#include "anomalens/eval/events.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "anomalens/error.hpp"

namespace anomalens::eval {
namespace {

std::vector<bool> normal_mask(std::size_t bins, std::span<const EventSpan> events,
                              const EventWindowConfig& config) {
  if (config.window < 0) throw DataError("event window must be non-negative");
  std::vector<bool> normal(bins, true);
  const auto n = static_cast<Index>(bins);
  auto clear = [&](Index first, Index last) {
    for (Index t = std::max<Index>(first, 0); t < std::min(last, n); ++t) {
      normal[static_cast<std::size_t>(t)] = false;
    }
  };
  for (const auto& e : events) clear(e.start - config.window, e.start + e.duration + config.window);
  for (const auto& [first, last] : config.excluded) clear(first, last);
  return normal;
}

}  // namespace

EventRates event_tpr_fpr(std::span<const double> scores, double threshold,
                         std::span<const EventSpan> events, const EventWindowConfig& config) {
  const std::vector<bool> normal = normal_mask(scores.size(), events, config);
  const auto n = static_cast<Index>(scores.size());
  EventRates r;
  r.events = events.size();
  for (const auto& e : events) {
    if (e.duration <= 0) throw DataError("event duration must be positive");
    const Index first = std::max<Index>(e.start - config.window, 0);
    const Index last = std::min(e.start + e.duration + config.window, n);
    for (Index t = first; t < last; ++t) {
      if (scores[static_cast<std::size_t>(t)] > threshold) {
        ++r.detected;
        break;
      }
    }
  }
  for (std::size_t t = 0; t < scores.size(); ++t) {
    if (!normal[t]) continue;
    ++r.normal_bins;
    if (scores[t] > threshold) ++r.false_alarms;
  }
  r.zero_events = r.events == 0;
  r.tpr = r.zero_events ? 1.0 : static_cast<double>(r.detected) / static_cast<double>(r.events);
  r.fpr = r.normal_bins == 0 ? 0.0
                             : static_cast<double>(r.false_alarms) /
                                   static_cast<double>(r.normal_bins);
  return r;
}

double threshold_for_fpr(std::span<const double> normal_scores, double target_fpr) {
  if (normal_scores.empty()) throw DataError("threshold_for_fpr: no normal scores");
  if (!(target_fpr >= 0.0 && target_fpr <= 1.0)) {
    throw DataError("threshold_for_fpr: target must be in [0, 1]");
  }
  std::vector<double> sorted(normal_scores.begin(), normal_scores.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  if (target_fpr == 0.0) {
    return std::nextafter(sorted.back(), std::numeric_limits<double>::infinity());
  }
  const auto allowed = static_cast<std::size_t>(std::floor(target_fpr * static_cast<double>(n)));
  if (allowed >= n) return -std::numeric_limits<double>::infinity();
  return sorted[n - allowed - 1];
}

std::vector<double> normal_bin_scores(std::span<const double> scores,
                                      std::span<const EventSpan> events,
                                      const EventWindowConfig& config) {
  const std::vector<bool> normal = normal_mask(scores.size(), events, config);
  std::vector<double> out;
  for (std::size_t t = 0; t < scores.size(); ++t) {
    if (normal[t]) out.push_back(scores[t]);
  }
  return out;
}

}  // namespace anomalens::eval
