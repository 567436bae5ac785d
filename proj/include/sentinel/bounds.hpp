#pragma once

#include <cstddef>
#include <vector>

namespace sentinel {

/// Additive slack allowed when comparing a left-hand side to its bound.
inline constexpr double kBoundSlack = 1e-10;

/// One evaluation of an inequality lhs <= rhs(t).
struct BoundPoint {
  std::size_t t = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// Per-t evaluations; holds iff every point holds.
struct BoundReport {
  std::vector<BoundPoint> points;
  bool holds = false;
};

}  // namespace sentinel
