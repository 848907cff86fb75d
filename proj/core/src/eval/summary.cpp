#include "anomalens/eval/summary.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "anomalens/error.hpp"
#include "anomalens/rng.hpp"

namespace anomalens::eval {

MeanInterval bootstrap_mean(std::span<const double> values, std::uint64_t seed,
                            std::size_t resamples, double level) {
  if (values.empty()) throw DataError("bootstrap: no values");
  if (!(level > 0.0 && level < 1.0) || resamples == 0) throw DataError("bootstrap: bad settings");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = sorted.size();

  MeanInterval out;
  for (double v : sorted) out.mean += v;
  out.mean /= static_cast<double>(n);

  Rng rng(seed);
  std::vector<double> means(resamples);
  for (auto& m : means) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += sorted[rng.below(n)];
    m = total / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  const double tail = (1.0 - level) / 2.0;
  auto at = [&](double q) {
    const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(resamples - 1)));
    return means[std::min(idx, resamples - 1)];
  };
  out.lo = at(tail);
  out.hi = at(1.0 - tail);
  return out;
}

}  // namespace anomalens::eval
