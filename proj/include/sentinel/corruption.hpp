#pragma once

#include "sentinel/chain.hpp"

#include <cstddef>
#include <vector>

namespace sentinel {

/// How far a corrupted chain is from the original, weighted by the
/// original stationary distribution.
struct CorruptionReport {
  /// sum_{x,y} pi(x) |P(x,y) - P~(x,y)|, in [0, 2]. Raw l1 convention.
  double epsilon = 0.0;
  /// d_TV(P(x,.), P~(x,.)) per row.
  Vector per_row_tv;
  /// Rows with per_row_tv > 0, ascending.
  std::vector<std::size_t> corrupted_rows;
};

CorruptionReport measure_corruption(const MarkovChain& original, const MarkovChain& corrupted,
                                    const Dist& pi);

}  // namespace sentinel
