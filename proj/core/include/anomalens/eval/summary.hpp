#pragma once

#include <cstdint>
#include <span>

namespace anomalens::eval {

struct MeanInterval {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

/// Mean with a percentile bootstrap interval. Values are sorted before any
/// reduction so the result does not depend on their order.
MeanInterval bootstrap_mean(std::span<const double> values, std::uint64_t seed,
                            std::size_t resamples = 2000, double level = 0.95);

}  // namespace anomalens::eval
