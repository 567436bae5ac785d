#include "sentinel/chain.hpp"

#include "sentinel/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sentinel {

namespace {

Storage resolve(StoragePolicy policy, std::size_t n) {
  switch (policy) {
    case StoragePolicy::Dense: return Storage::Dense;
    case StoragePolicy::Sparse: return Storage::Sparse;
    case StoragePolicy::Auto: break;
  }
  return n <= kDenseLimit ? Storage::Dense : Storage::Sparse;
}

SparseMatrix to_sparse(std::size_t n, const std::vector<Triplet>& triplets) {
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(triplets.size());
  for (const auto& t : triplets) {
    entries.emplace_back(static_cast<int>(t.row), static_cast<int>(t.col), t.prob);
  }
  SparseMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  m.setFromTriplets(entries.begin(), entries.end());
  m.makeCompressed();
  return m;
}

// Rows whose sum is off by no more than accumulated rounding are kept
// verbatim, so values survive a write/read cycle bit for bit.
bool needs_renormalization(double sum, std::size_t n) {
  return std::abs(sum - 1.0) > 4.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon();
}

void check_row_sum(std::size_t row, double sum, double tol) {
  if (!(std::abs(sum - 1.0) <= tol)) {
    throw Error(ErrorCode::RowSumOutOfTolerance,
                "row " + std::to_string(row) + " sums to " + std::to_string(sum), row,
                std::nullopt, sum);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Dist / WeightedFn

Dist Dist::from_values(Vector values) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::NonFinite, "distribution entry is not finite",
                  static_cast<std::size_t>(i));
    }
    if (v < 0.0) {
      throw Error(ErrorCode::InvalidDistribution, "negative probability",
                  static_cast<std::size_t>(i), std::nullopt, v);
    }
    sum += v;
  }
  if (values.size() == 0 || std::abs(sum - 1.0) > kDistTolerance) {
    throw Error(ErrorCode::InvalidDistribution,
                "probabilities sum to " + std::to_string(sum), std::nullopt, std::nullopt,
                sum);
  }
  return Dist(std::move(values));
}

Dist Dist::from_numeric(Vector values) {
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(ErrorCode::NonFinite, "distribution entry is not finite",
                  static_cast<std::size_t>(i));
    }
    if (values[i] < 0.0) {
      if (values[i] < -1e-12) {
        throw Error(ErrorCode::InvalidDistribution, "solver produced a negative mass",
                    static_cast<std::size_t>(i), std::nullopt, values[i]);
      }
      values[i] = 0.0;
    }
  }
  const double sum = values.sum();
  if (!(sum > 0.0)) {
    throw Error(ErrorCode::InvalidDistribution, "vector has no mass");
  }
  values /= sum;
  return Dist(std::move(values));
}

Dist Dist::uniform(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidDistribution, "empty state space");
  return Dist(Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n)));
}

Dist Dist::point_mass(std::size_t n, std::size_t state) {
  if (state >= n) throw Error(ErrorCode::IndexOutOfBounds, "point mass outside [0, n)", state);
  Vector v = Vector::Zero(static_cast<Eigen::Index>(n));
  v[static_cast<Eigen::Index>(state)] = 1.0;
  return Dist(std::move(v));
}

WeightedFn::WeightedFn(Vector values) : values_(std::move(values)) {
  if (!values_.allFinite()) throw Error(ErrorCode::NonFinite, "function value is not finite");
}

// ---------------------------------------------------------------------------
// MarkovChain

Storage MarkovChain::storage() const noexcept {
  return std::holds_alternative<DenseMatrix>(base_) ? Storage::Dense : Storage::Sparse;
}

MarkovChain MarkovChain::base() const {
  MarkovChain out = *this;
  out.restart_weight_ = 0.0;
  out.restart_ = Vector();
  return out;
}

double MarkovChain::entry(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) throw Error(ErrorCode::IndexOutOfBounds, "entry outside chain", i, j);
  const auto r = static_cast<Eigen::Index>(i);
  const auto c = static_cast<Eigen::Index>(j);
  const double b = dense_base() ? (*dense_base())(r, c) : sparse_base()->coeff(r, c);
  if (!is_composite()) return b;
  return (1.0 - restart_weight_) * b + restart_weight_ * restart_[c];
}

Vector MarkovChain::row(std::size_t i) const {
  if (i >= n_) throw Error(ErrorCode::IndexOutOfBounds, "row outside chain", i);
  const auto r = static_cast<Eigen::Index>(i);
  Vector out;
  if (const auto* d = dense_base()) {
    out = d->row(r).transpose();
  } else {
    out = Vector::Zero(static_cast<Eigen::Index>(n_));
    for (SparseMatrix::InnerIterator it(*sparse_base(), r); it; ++it) out[it.col()] = it.value();
  }
  if (is_composite()) out = (1.0 - restart_weight_) * out + restart_weight_ * restart_;
  return out;
}

Vector MarkovChain::apply(const Vector& f) const {
  if (static_cast<std::size_t>(f.size()) != n_) {
    throw Error(ErrorCode::LengthMismatch, "function length differs from state count");
  }
  Vector out = dense_base() ? Vector(*dense_base() * f) : Vector(*sparse_base() * f);
  if (is_composite()) {
    out = (1.0 - restart_weight_) * out +
          Vector::Constant(f.size(), restart_weight_ * restart_.dot(f));
  }
  return out;
}

Vector MarkovChain::left_multiply(const Vector& nu) const {
  if (static_cast<std::size_t>(nu.size()) != n_) {
    throw Error(ErrorCode::LengthMismatch, "row vector length differs from state count");
  }
  Vector out = dense_base() ? Vector(dense_base()->transpose() * nu)
                            : Vector(sparse_base()->transpose() * nu);
  if (is_composite()) out = (1.0 - restart_weight_) * out + (restart_weight_ * nu.sum()) * restart_;
  return out;
}

DenseMatrix MarkovChain::to_dense() const {
  DenseMatrix m = dense_base() ? *dense_base() : DenseMatrix(sparse_base()->toDense());
  if (is_composite()) {
    m *= (1.0 - restart_weight_);
    m.rowwise() += restart_weight_ * restart_.transpose();
  }
  return m;
}

std::vector<Triplet> MarkovChain::triplets() const {
  std::vector<Triplet> out;
  if (!is_composite() && sparse_base()) {
    out.reserve(static_cast<std::size_t>(sparse_base()->nonZeros()));
    for (Eigen::Index r = 0; r < sparse_base()->outerSize(); ++r) {
      for (SparseMatrix::InnerIterator it(*sparse_base(), r); it; ++it) {
        if (it.value() != 0.0) {
          out.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(it.col()),
                         it.value()});
        }
      }
    }
    return out;
  }
  for (std::size_t i = 0; i < n_; ++i) {
    const Vector r = row(i);
    for (std::size_t j = 0; j < n_; ++j) {
      const double v = r[static_cast<Eigen::Index>(j)];
      if (v != 0.0) out.push_back({i, j, v});
    }
  }
  return out;
}

MarkovChain MarkovChain::restart_mixture(double delta, const Vector& mu) const {
  if (static_cast<std::size_t>(mu.size()) != n_) {
    throw Error(ErrorCode::SizeMismatch, "restart distribution length differs from state count");
  }
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "damping must lie in [0, 1]", std::nullopt, std::nullopt,
                delta);
  }
  if (delta == 0.0) return *this;
  MarkovChain out = *this;
  if (auto* d = std::get_if<DenseMatrix>(&out.base_)) {
    *d *= (1.0 - delta);
    d->rowwise() += delta * mu.transpose();
    return out;
  }
  const double w = restart_weight_;
  const double combined = 1.0 - (1.0 - delta) * (1.0 - w);
  Vector nu = delta * mu;
  if (w > 0.0) nu += (1.0 - delta) * w * restart_;
  out.restart_weight_ = combined;
  out.restart_ = nu / combined;
  return out;
}

bool MarkovChain::approx_equal(const MarkovChain& other, double tol) const {
  if (n_ != other.n_) return false;
  if (!is_composite() && !other.is_composite() && (sparse_base() || other.sparse_base())) {
    const SparseMatrix a = sparse_base() ? *sparse_base() : dense_base()->sparseView();
    const SparseMatrix b =
        other.sparse_base() ? *other.sparse_base() : other.dense_base()->sparseView();
    const SparseMatrix diff = a - b;
    for (Eigen::Index k = 0; k < diff.nonZeros(); ++k) {
      if (std::abs(diff.valuePtr()[k]) > tol) return false;
    }
    return true;
  }
  for (std::size_t i = 0; i < n_; ++i) {
    if ((row(i) - other.row(i)).cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

MarkovChain MarkovChain::from_dense_unchecked(DenseMatrix m, double row_tolerance,
                                              StoragePolicy policy) {
  MarkovChain out;
  out.n_ = static_cast<std::size_t>(m.rows());
  out.row_tolerance_ = row_tolerance;
  if (resolve(policy, out.n_) == Storage::Dense) {
    out.base_ = std::move(m);
  } else {
    SparseMatrix s = m.sparseView();
    s.makeCompressed();
    out.base_ = std::move(s);
  }
  return out;
}

MarkovChain MarkovChain::from_sparse_unchecked(SparseMatrix m, double row_tolerance,
                                               StoragePolicy policy) {
  MarkovChain out;
  out.n_ = static_cast<std::size_t>(m.rows());
  out.row_tolerance_ = row_tolerance;
  if (resolve(policy, out.n_) == Storage::Dense) {
    out.base_ = DenseMatrix(m.toDense());
  } else {
    m.makeCompressed();
    out.base_ = std::move(m);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Validation

MarkovChain validate_chain(const DenseMatrix& raw, double row_tolerance, StoragePolicy policy) {
  if (raw.rows() != raw.cols() || raw.rows() == 0) {
    throw Error(ErrorCode::NonSquare, "transition matrix must be square and nonempty");
  }
  if (!(row_tolerance >= 0.0)) {
    throw Error(ErrorCode::OutOfRange, "row tolerance must be nonnegative");
  }
  DenseMatrix m = raw;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      const auto ui = static_cast<std::size_t>(i);
      const auto uj = static_cast<std::size_t>(j);
      if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "entry is not finite", ui, uj);
      if (v < 0.0) {
        throw Error(ErrorCode::NegativeEntry,
                    "entry (" + std::to_string(i) + ", " + std::to_string(j) + ") is negative",
                    ui, uj, v);
      }
      sum += v;
    }
    check_row_sum(static_cast<std::size_t>(i), sum, row_tolerance);
    if (needs_renormalization(sum, static_cast<std::size_t>(m.cols()))) m.row(i) /= sum;
  }
  return MarkovChain::from_dense_unchecked(std::move(m), row_tolerance, policy);
}

MarkovChain validate_chain(const std::vector<std::vector<double>>& rows, double row_tolerance,
                           StoragePolicy policy) {
  const std::size_t n = rows.size();
  DenseMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) {
      throw Error(ErrorCode::NonSquare, "row " + std::to_string(i) + " has " +
                                            std::to_string(rows[i].size()) + " entries, expected " +
                                            std::to_string(n),
                  i);
    }
    for (std::size_t j = 0; j < n; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return validate_chain(m, row_tolerance, policy);
}

MarkovChain validate_chain(std::size_t n, std::vector<Triplet> triplets, double row_tolerance,
                           StoragePolicy policy) {
  if (n == 0) throw Error(ErrorCode::NonSquare, "chain must have at least one state");
  if (!(row_tolerance >= 0.0)) {
    throw Error(ErrorCode::OutOfRange, "row tolerance must be nonnegative");
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<double> sums(n, 0.0);
  for (std::size_t k = 0; k < triplets.size(); ++k) {
    const auto& t = triplets[k];
    if (t.row >= n || t.col >= n) {
      throw Error(ErrorCode::IndexOutOfBounds, "triplet index outside [0, n)", t.row, t.col);
    }
    if (k > 0 && triplets[k - 1].row == t.row && triplets[k - 1].col == t.col) {
      throw Error(ErrorCode::DuplicateEntry, "duplicate triplet key", t.row, t.col);
    }
    if (!std::isfinite(t.prob)) throw Error(ErrorCode::NonFinite, "entry is not finite", t.row, t.col);
    if (t.prob < 0.0) {
      throw Error(ErrorCode::NegativeEntry, "negative triplet", t.row, t.col, t.prob);
    }
    sums[t.row] += t.prob;
  }
  for (std::size_t i = 0; i < n; ++i) check_row_sum(i, sums[i], row_tolerance);
  std::erase_if(triplets, [](const Triplet& t) { return t.prob == 0.0; });
  for (auto& t : triplets) {
    if (needs_renormalization(sums[t.row], n)) t.prob /= sums[t.row];
  }
  return MarkovChain::from_sparse_unchecked(to_sparse(n, triplets), row_tolerance, policy);
}

}  // namespace sentinel
