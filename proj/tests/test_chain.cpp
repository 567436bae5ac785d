#include "test_util.hpp"

#include "sentinel/chain.hpp"

#include <cmath>
#include <limits>

using namespace sentinel;
using testutil::chain_of;

TEST(ValidateChain, IdentityIsValid) {
  const MarkovChain c = validate_chain(DenseMatrix::Identity(2, 2));
  EXPECT_EQ(c.n(), 2u);
  EXPECT_EQ(c.storage(), Storage::Dense);
  EXPECT_EQ(c.entry(0, 0), 1.0);
  EXPECT_EQ(c.entry(0, 1), 0.0);
}

TEST(ValidateChain, RowSumOutOfToleranceCarriesRowAndSum) {
  try {
    validate_chain(std::vector<std::vector<double>>{{0.5, 0.5}, {0.3, 0.8}});
    FAIL() << "expected RowSumOutOfTolerance";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RowSumOutOfTolerance);
    ASSERT_TRUE(e.first().has_value());
    EXPECT_EQ(*e.first(), 1u);
    ASSERT_TRUE(e.value().has_value());
    EXPECT_NEAR(*e.value(), 1.1, 1e-15);
  }
}

TEST(ValidateChain, RowWithinToleranceIsRenormalized) {
  const MarkovChain c =
      validate_chain(std::vector<std::vector<double>>{{0.5, 0.5 + 1e-12}, {0.5, 0.5}});
  EXPECT_NEAR(c.row(0).sum(), 1.0, 2e-16);
  EXPECT_LT(c.entry(0, 1), 0.5 + 1e-12);
  EXPECT_NEAR(c.entry(0, 1), 0.5, 1e-12);
}

TEST(ValidateChain, ExactRowsAreKeptVerbatim) {
  const std::vector<std::vector<double>> rows{{0.1, 0.2, 0.7}, {0.3, 0.3, 0.4}, {1.0, 0.0, 0.0}};
  const MarkovChain c = validate_chain(rows);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(c.entry(i, j), rows[i][j]);
  }
}

TEST(ValidateChain, RejectsBadInput) {
  try {
    validate_chain(std::vector<std::vector<double>>{{1.2, -0.2}, {0.5, 0.5}});
    FAIL() << "expected NegativeEntry";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NegativeEntry);
    EXPECT_EQ(e.first(), std::optional<std::size_t>(0));
    EXPECT_EQ(e.second(), std::optional<std::size_t>(1));
  }
  EXPECT_ERROR(ErrorCode::NonSquare,
               validate_chain(std::vector<std::vector<double>>{{1.0}, {0.5, 0.5}}));
  EXPECT_ERROR(ErrorCode::NonSquare, validate_chain(DenseMatrix(2, 3)));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_ERROR(ErrorCode::NonFinite,
               validate_chain(std::vector<std::vector<double>>{{nan, 1.0}, {0.5, 0.5}}));
}

TEST(ValidateChain, TripletChecks) {
  EXPECT_ERROR(ErrorCode::DuplicateEntry,
               validate_chain(2, {{0, 0, 0.5}, {0, 0, 0.5}, {1, 1, 1.0}}));
  EXPECT_ERROR(ErrorCode::IndexOutOfBounds, validate_chain(2, {{0, 2, 1.0}, {1, 1, 1.0}}));
  EXPECT_ERROR(ErrorCode::RowSumOutOfTolerance, validate_chain(2, {{0, 0, 1.0}}));
  EXPECT_ERROR(ErrorCode::NegativeEntry,
               validate_chain(2, {{0, 0, 1.5}, {0, 1, -0.5}, {1, 1, 1.0}}));

  // Unsorted input comes back sorted.
  const MarkovChain c = validate_chain(2, {{1, 1, 0.6}, {0, 1, 1.0}, {1, 0, 0.4}});
  const auto t = c.triplets();
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0].row, 0u);
  EXPECT_EQ(t[1].col, 0u);
  EXPECT_EQ(t[2].prob, 0.6);
}

TEST(ValidateChain, StoragePolicy) {
  const oracle::Mat m = oracle::random_sparse_stochastic(20, 3);
  const MarkovChain dense = chain_of(m, StoragePolicy::Dense);
  const MarkovChain sparse = chain_of(m, StoragePolicy::Sparse);
  EXPECT_EQ(dense.storage(), Storage::Dense);
  EXPECT_EQ(sparse.storage(), Storage::Sparse);
  EXPECT_TRUE(dense.approx_equal(sparse, 0.0));

  const Vector f = oracle::random_dist(20, 4);
  EXPECT_LE((dense.apply(f) - sparse.apply(f)).lpNorm<Eigen::Infinity>(), 1e-15);
  EXPECT_LE((dense.left_multiply(f) - sparse.left_multiply(f)).lpNorm<Eigen::Infinity>(), 1e-15);
  EXPECT_LE((dense.left_multiply(f) - (f.transpose() * m).transpose()).lpNorm<Eigen::Infinity>(),
            1e-15);
}

TEST(Dist, Validation) {
  EXPECT_ERROR(ErrorCode::InvalidDistribution, Dist::from_values(Vector::Constant(2, 0.6)));
  Vector neg(2);
  neg << 1.5, -0.5;
  EXPECT_ERROR(ErrorCode::InvalidDistribution, Dist::from_values(neg));
  Vector nan(2);
  nan << std::numeric_limits<double>::quiet_NaN(), 1.0;
  EXPECT_ERROR(ErrorCode::NonFinite, Dist::from_values(nan));

  Vector almost(2);
  almost << -1e-13, 0.5;
  const Dist d = Dist::from_numeric(almost);
  EXPECT_EQ(d[0], 0.0);
  EXPECT_EQ(d[1], 1.0);

  EXPECT_EQ(Dist::uniform(4)[3], 0.25);
  EXPECT_EQ(Dist::point_mass(3, 2)[2], 1.0);
  EXPECT_ERROR(ErrorCode::IndexOutOfBounds, Dist::point_mass(3, 3));
  EXPECT_ERROR(ErrorCode::NonFinite, WeightedFn(nan));
}

TEST(RestartMixture, Examples) {
  const MarkovChain p = validate_chain(DenseMatrix::Identity(2, 2));
  const Vector mu = Vector::Constant(2, 0.5);
  EXPECT_TRUE(p.restart_mixture(0.0, mu).approx_equal(p, 0.0));

  const MarkovChain full = p.restart_mixture(1.0, mu);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(full.row(i), mu);

  const MarkovChain half = p.restart_mixture(0.5, mu);
  EXPECT_EQ(half.entry(0, 0), 0.75);
  EXPECT_EQ(half.entry(0, 1), 0.25);
  EXPECT_EQ(half.entry(1, 0), 0.25);
  EXPECT_EQ(half.entry(1, 1), 0.75);

  EXPECT_ERROR(ErrorCode::SizeMismatch, p.restart_mixture(0.5, Vector::Constant(3, 1.0 / 3)));
  EXPECT_ERROR(ErrorCode::OutOfRange, p.restart_mixture(1.5, mu));
}

TEST(RestartMixture, SparseCompositeMatchesDense) {
  const oracle::Mat m = oracle::random_sparse_stochastic(40, 9);
  const Vector mu = oracle::random_dist(40, 10);
  const MarkovChain dense = chain_of(m, StoragePolicy::Dense).restart_mixture(0.3, mu);
  const MarkovChain lazy = chain_of(m, StoragePolicy::Sparse).restart_mixture(0.3, mu);
  EXPECT_FALSE(dense.is_composite());
  EXPECT_TRUE(lazy.is_composite());
  const Vector f = oracle::random_dist(40, 11) * 7.0 - Vector::Ones(40);
  EXPECT_LE((dense.apply(f) - lazy.apply(f)).lpNorm<Eigen::Infinity>(), 1e-14);
  EXPECT_LE((dense.left_multiply(f) - lazy.left_multiply(f)).lpNorm<Eigen::Infinity>(), 1e-14);
  EXPECT_TRUE(dense.approx_equal(lazy, 1e-14));

  // Nested mixtures fold: (1-b)((1-a)P + a mu) + b mu = (1-a)(1-b)P + (1-(1-a)(1-b)) mu.
  const MarkovChain nested = lazy.restart_mixture(0.2, mu);
  const MarkovChain direct = chain_of(m, StoragePolicy::Sparse).restart_mixture(1 - 0.7 * 0.8, mu);
  EXPECT_NEAR(nested.restart_weight(), 1 - 0.7 * 0.8, 1e-15);
  EXPECT_TRUE(nested.approx_equal(direct, 1e-14));
}

TEST(MarkovChain, AccessorsCheckBounds) {
  const MarkovChain c = validate_chain(DenseMatrix::Identity(3, 3));
  EXPECT_ERROR(ErrorCode::IndexOutOfBounds, c.entry(3, 0));
  EXPECT_ERROR(ErrorCode::IndexOutOfBounds, c.row(5));
  EXPECT_ERROR(ErrorCode::LengthMismatch, c.apply(Vector::Ones(2)));
  EXPECT_ERROR(ErrorCode::LengthMismatch, c.left_multiply(Vector::Ones(4)));
}
