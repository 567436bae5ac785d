#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

namespace sentinel {

using Vector = Eigen::VectorXd;
using DenseMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

inline constexpr double kRowTolerance = 1e-10;
inline constexpr double kDistTolerance = 1e-10;
inline constexpr double kStationaryTolerance = 1e-8;
/// Chains with more states than this are stored as sparse triplets.
inline constexpr std::size_t kDenseLimit = 2048;

/// A probability row vector on [n].
class Dist {
 public:
  /// Checks nonnegativity and |sum - 1| <= 1e-10. Values are kept as given.
  static Dist from_values(Vector values);
  /// For solver output: clamps entries in [-1e-12, 0) to zero and
  /// renormalizes. Anything more negative is an InvalidDistribution.
  static Dist from_numeric(Vector values);
  static Dist uniform(std::size_t n);
  static Dist point_mass(std::size_t n, std::size_t state);

  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
  double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
  const Vector& values() const noexcept { return values_; }

  bool operator==(const Dist& other) const { return values_ == other.values_; }

 private:
  explicit Dist(Vector values) : values_(std::move(values)) {}
  Vector values_;
};

/// A real function on states, stored as a column vector.
class WeightedFn {
 public:
  explicit WeightedFn(Vector values);
  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
  double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
  const Vector& values() const noexcept { return values_; }

 private:
  Vector values_;
};

enum class Storage { Dense, Sparse };
enum class StoragePolicy { Auto, Dense, Sparse };

struct Triplet {
  std::size_t row;
  std::size_t col;
  double prob;
};

/// Row-stochastic transition matrix. Immutable after construction.
///
/// Besides plain dense or sparse storage, a sparse chain may carry a
/// restart mixture (1 - w) * B + w * 1^T nu that is applied lazily, so a
/// PageRank chain over a large sparse base never densifies.
class MarkovChain {
 public:
  std::size_t n() const noexcept { return n_; }
  Storage storage() const noexcept;
  double row_tolerance() const noexcept { return row_tolerance_; }

  bool is_composite() const noexcept { return restart_weight_ > 0.0; }
  /// Weight w of the lazy restart part, 0 for plain chains.
  double restart_weight() const noexcept { return restart_weight_; }
  /// Restart distribution of the lazy part (empty for plain chains).
  const Vector& restart_values() const noexcept { return restart_; }
  /// The chain without its lazy restart part.
  MarkovChain base() const;

  double entry(std::size_t i, std::size_t j) const;
  Vector row(std::size_t i) const;

  /// P f, with f a column vector.
  Vector apply(const Vector& f) const;
  /// nu P, with nu a row vector.
  Vector left_multiply(const Vector& nu) const;

  DenseMatrix to_dense() const;
  /// Nonzero entries, sorted by (row, col).
  std::vector<Triplet> triplets() const;

  /// (1 - delta) P + delta 1^T mu. Dense chains are materialized; sparse
  /// chains get a lazy restart part (nested mixtures are folded together).
  MarkovChain restart_mixture(double delta, const Vector& mu) const;

  /// Entrywise comparison within tol, independent of storage.
  bool approx_equal(const MarkovChain& other, double tol) const;

  // Constructors used by validate_chain and by internal code that already
  // guarantees row-stochasticity.
  static MarkovChain from_dense_unchecked(DenseMatrix m, double row_tolerance,
                                          StoragePolicy policy = StoragePolicy::Auto);
  static MarkovChain from_sparse_unchecked(SparseMatrix m, double row_tolerance,
                                           StoragePolicy policy = StoragePolicy::Auto);

  const DenseMatrix* dense_base() const { return std::get_if<DenseMatrix>(&base_); }
  const SparseMatrix* sparse_base() const { return std::get_if<SparseMatrix>(&base_); }

 private:
  MarkovChain() = default;

  std::size_t n_ = 0;
  double row_tolerance_ = kRowTolerance;
  std::variant<DenseMatrix, SparseMatrix> base_;
  double restart_weight_ = 0.0;
  Vector restart_;
};

/// Validates a dense matrix and renormalizes rows lying within
/// row_tolerance of 1.
MarkovChain validate_chain(const DenseMatrix& raw, double row_tolerance = kRowTolerance,
                           StoragePolicy policy = StoragePolicy::Auto);

/// Same as above for ragged nested rows (e.g. parsed from JSON).
MarkovChain validate_chain(const std::vector<std::vector<double>>& rows,
                           double row_tolerance = kRowTolerance,
                           StoragePolicy policy = StoragePolicy::Auto);

/// Triplet input; (row, col) keys must be unique and within [0, n).
MarkovChain validate_chain(std::size_t n, std::vector<Triplet> triplets,
                           double row_tolerance = kRowTolerance,
                           StoragePolicy policy = StoragePolicy::Auto);

}  // namespace sentinel
