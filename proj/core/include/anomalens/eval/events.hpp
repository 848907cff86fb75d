#pragma once

#include <span>
#include <utility>
#include <vector>

#include "anomalens/types.hpp"

namespace anomalens::eval {

/// An event occupying bins [start, start + duration).
struct EventSpan {
  Index start = 0;
  Index duration = 1;
};

struct EventWindowConfig {
  Index window = 5;  // bins on either side of an event
  /// Extra spans [first, last) excluded from the normal bins (maintenance).
  std::vector<std::pair<Index, Index>> excluded;
};

struct EventRates {
  double tpr = 1.0;
  double fpr = 0.0;
  std::size_t events = 0;
  std::size_t detected = 0;
  std::size_t normal_bins = 0;
  std::size_t false_alarms = 0;
  bool zero_events = false;  // tpr is vacuous
};

/// An event is detected when any bin inside its window scores above the
/// threshold. The FPR counts exceedances over bins outside every window and
/// excluded span. With no events the TPR is reported as 1 with zero_events set.
EventRates event_tpr_fpr(std::span<const double> scores, double threshold,
                         std::span<const EventSpan> events, const EventWindowConfig& config);

/// Smallest threshold whose exceedance fraction (score > threshold) over the
/// given normal scores is at most target_fpr. target 0 gives the next double
/// above the maximum, target 1 gives -infinity.
double threshold_for_fpr(std::span<const double> normal_scores, double target_fpr);

/// Scores of the bins counted as normal by event_tpr_fpr.
std::vector<double> normal_bin_scores(std::span<const double> scores,
                                      std::span<const EventSpan> events,
                                      const EventWindowConfig& config);

}  // namespace anomalens::eval
