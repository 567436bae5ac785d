#include "sentinel/corruption.hpp"

#include "sentinel/errors.hpp"
#include "sentinel/geometry.hpp"

#include <string>

namespace sentinel {

namespace {

Vector row_l1_differences(const MarkovChain& a, const MarkovChain& b) {
  const auto n = static_cast<Eigen::Index>(a.n());
  Vector out = Vector::Zero(n);
  const bool plain = !a.is_composite() && !b.is_composite();
  if (plain && a.dense_base() && b.dense_base()) {
    out = (*a.dense_base() - *b.dense_base()).cwiseAbs().rowwise().sum();
    return out;
  }
  if (plain) {
    const SparseMatrix sa = a.sparse_base() ? *a.sparse_base() : a.dense_base()->sparseView();
    const SparseMatrix sb = b.sparse_base() ? *b.sparse_base() : b.dense_base()->sparseView();
    const SparseMatrix diff = sa - sb;
    for (Eigen::Index r = 0; r < diff.outerSize(); ++r) {
      for (SparseMatrix::InnerIterator it(diff, r); it; ++it) out[r] += std::abs(it.value());
    }
    return out;
  }
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto i = static_cast<std::size_t>(r);
    out[r] = (a.row(i) - b.row(i)).lpNorm<1>();
  }
  return out;
}

}  // namespace

CorruptionReport measure_corruption(const MarkovChain& original, const MarkovChain& corrupted,
                                    const Dist& pi) {
  if (original.n() != corrupted.n() || pi.size() != original.n()) {
    throw Error(ErrorCode::SizeMismatch, "chains and distribution must share a state count");
  }
  const double residual = stationarity_residual(original, pi);
  if (!(residual <= kStationaryTolerance)) {
    throw Error(ErrorCode::NotStationary, "||pi P - pi||_1 = " + std::to_string(residual),
                std::nullopt, std::nullopt, residual);
  }

  CorruptionReport report;
  const Vector l1 = row_l1_differences(original, corrupted);
  report.per_row_tv = 0.5 * l1;
  report.epsilon = pi.values().dot(l1);
  for (Eigen::Index x = 0; x < l1.size(); ++x) {
    if (report.per_row_tv[x] > 0.0) report.corrupted_rows.push_back(static_cast<std::size_t>(x));
  }
  return report;
}

}  // namespace sentinel
