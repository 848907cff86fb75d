#pragma once

#include <span>
#include <vector>

#include "anomalens/types.hpp"

namespace anomalens::contribution {

struct RankedDimension {
  Index index = 0;
  double magnitude = 0.0;  // |value|
};

struct TopDimensions {
  std::vector<RankedDimension> entries;
  std::size_t nonzero = 0;  // entries with magnitude > 0

  bool no_contributors() const noexcept { return nonzero == 0; }
};

/// The min(k, N) dimensions with the largest |metric|, descending; ties go to
/// the lower index. Zero entries are included when k exceeds the nonzero count.
TopDimensions top_k_dimensions(const Vector& metric, std::size_t k);

/// Dimensions whose |metric| is strictly above the mean |metric|, ascending.
std::vector<Index> estimated_dimension_set(const Vector& metric);

struct RecallPrecision {
  double recall = 0.0;
  double precision = 0.0;
};

/// |estimated ∩ actual| / |actual| and / |estimated|; an empty denominator
/// gives 0.
RecallPrecision recall_precision(std::span<const Index> estimated, std::span<const Index> actual);

}  // namespace anomalens::contribution
