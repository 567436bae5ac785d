#include "test_util.hpp"

#include "sentinel/adversary.hpp"
#include "sentinel/geometry.hpp"
#include "sentinel/stationary.hpp"

#include <cmath>
#include <random>

using namespace sentinel;
using testutil::chain_of;
using testutil::dist_of;

namespace {

Dist d2(double a, double b) {
  Vector v(2);
  v << a, b;
  return Dist::from_values(v);
}

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST(TvDistance, Examples) {
  EXPECT_EQ(tv_distance(d2(0.3, 0.7), d2(0.3, 0.7)), 0.0);
  EXPECT_EQ(tv_distance(d2(1, 0), d2(0, 1)), 1.0);
  EXPECT_EQ(tv_distance(d2(0.5, 0.5), d2(0.75, 0.25)), 0.25);
  EXPECT_EQ(l1_distance(d2(0.5, 0.5), d2(0.75, 0.25)), 0.5);
  EXPECT_ERROR(ErrorCode::LengthMismatch, tv_distance(d2(1, 0), Dist::uniform(3)));
}

TEST(TvDistance, MetricAxioms) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Dist a = dist_of(oracle::random_dist(7, 3 * s));
    const Dist b = dist_of(oracle::random_dist(7, 3 * s + 1));
    const Dist c = dist_of(oracle::random_dist(7, 3 * s + 2));
    EXPECT_GE(tv_distance(a, b), 0.0);
    EXPECT_NEAR(tv_distance(a, b), tv_distance(b, a), 1e-12);
    EXPECT_LE(tv_distance(a, c), tv_distance(a, b) + tv_distance(b, c) + 1e-12);
    EXPECT_LE(tv_distance(a, b), 1.0);
  }
}

TEST(WeightedNorm, Examples) {
  const Dist u = Dist::uniform(2);
  for (const double p : {1.0, 2.0, 3.5, kInfinity}) {
    EXPECT_NEAR(weighted_lp_norm(Vector::Constant(2, -2.5), u, p), 2.5, 1e-15);
  }
  EXPECT_NEAR(weighted_lp_norm(v2(1, -3), u, 2.0), std::sqrt(5.0), 1e-15);
  EXPECT_EQ(weighted_lp_norm(v2(1, 0), d2(0, 1), kInfinity), 0.0);
  EXPECT_ERROR(ErrorCode::InvalidExponent, weighted_lp_norm(v2(1, 0), u, 0.5));
  EXPECT_ERROR(ErrorCode::LengthMismatch, weighted_lp_norm(Vector::Ones(3), u, 2.0));
  EXPECT_NEAR(weighted_lp_norm(WeightedFn(v2(1, -3)), u, 1.0), 2.0, 1e-15);
}

TEST(WeightedNorm, AgreesWithOracleAndAvoidsOverflow) {
  const oracle::Vec pi = oracle::random_dist(10, 1);
  std::mt19937_64 gen(2);
  std::normal_distribution<double> g;
  for (const double p : {1.0, 1.5, 2.0, 4.0, 7.0}) {
    oracle::Vec f(10);
    for (auto& x : f) x = g(gen);
    EXPECT_NEAR(weighted_lp_norm(f, dist_of(pi), p), oracle::weighted_norm(f, pi, p), 1e-13);
  }
  // |f|^p overflows a double for p = 4 here; the result does not.
  const Vector big = Vector::Constant(4, 1e100);
  EXPECT_NEAR(weighted_lp_norm(big, Dist::uniform(4), 4.0) / 1e100, 1.0, 1e-14);
}

TEST(DualExponent, Values) {
  EXPECT_EQ(dual_exponent(kInfinity), 1.0);
  EXPECT_EQ(dual_exponent(1.0), kInfinity);
  EXPECT_EQ(dual_exponent(2.0), 2.0);
  EXPECT_NEAR(dual_exponent(4.0), 4.0 / 3.0, 1e-15);
}

TEST(Smoothness, Examples) {
  const Dist pi = dist_of(oracle::random_dist(6, 11));
  for (const double p : {1.0, 2.0, 4.0, kInfinity}) EXPECT_NEAR(smoothness(pi, pi, p), 1.0, 1e-14);
  EXPECT_NEAR(smoothness(d2(1, 0), d2(0.25, 0.75), 2.0), 2.0, 1e-15);

  // Uniform mu against alpha-spread pi is (1/alpha, inf)-smooth.
  const double alpha = 0.5;
  Vector spread(4);
  spread << alpha / 4, 1.0 / (alpha * 4), 0.25, 0.25 - (alpha / 4 + 1.0 / (alpha * 4) - 0.5);
  const Dist pi_spread = Dist::from_values(spread);
  EXPECT_LE(smoothness(Dist::uniform(4), pi_spread, kInfinity), 1.0 / alpha + 1e-15);

  EXPECT_ERROR(ErrorCode::UnsupportedMass, smoothness(d2(0.5, 0.5), d2(1, 0), 2.0));
}

TEST(DensityRatio, ZeroOverZeroIsZero) {
  const Vector r = density_ratio(d2(1, 0), d2(1, 0));
  EXPECT_EQ(r[0], 1.0);
  EXPECT_EQ(r[1], 0.0);
}

TEST(Contraction, RandomChainsAllExponents) {
  std::mt19937_64 gen(17);
  std::normal_distribution<double> g;
  for (std::uint64_t s = 0; s < 40; ++s) {
    const int n = 2 + static_cast<int>(s % 20);
    const MarkovChain c = chain_of(oracle::random_stochastic(n, s));
    const Dist pi = stationary(c);
    Vector f(n);
    for (auto& x : f) x = g(gen);
    for (const double p : {1.0, 2.0, 4.0, kInfinity}) {
      EXPECT_LE(weighted_lp_norm(c.apply(f), pi, p), weighted_lp_norm(f, pi, p) + 1e-10);
      const Vector ones = Vector::Constant(n, 3.0);
      EXPECT_NEAR(weighted_lp_norm(c.apply(ones), pi, p), 3.0, 1e-12);
    }
  }
}

TEST(Adjoint, ReversibleChainIsSelfAdjoint) {
  const TestChain t = make_test_chain(TestChainKind::RandomReversible, 15, 4);
  EXPECT_TRUE(adjoint(t.chain, t.pi).approx_equal(t.chain, 1e-12));
}

TEST(Adjoint, DoublyStochasticGivesTranspose) {
  // Convex combination of permutation matrices.
  oracle::Mat m = 0.5 * oracle::Mat::Identity(4, 4);
  for (int i = 0; i < 4; ++i) {
    m(i, (i + 1) % 4) += 0.3;
    m(i, (i + 3) % 4) += 0.2;
  }
  const MarkovChain c = chain_of(m);
  const MarkovChain star = adjoint(c, Dist::uniform(4));
  EXPECT_TRUE(star.approx_equal(chain_of(m.transpose()), 1e-15));
}

TEST(Adjoint, TwoStateEntrywise) {
  const MarkovChain c = chain_of(testutil::two_state(0.3, 0.1));
  const Dist pi = d2(0.25, 0.75);
  const MarkovChain star = adjoint(c, pi);
  // P*(x,y) = pi(y) P(y,x) / pi(x).
  EXPECT_NEAR(star.entry(0, 0), 0.7, 1e-15);
  EXPECT_NEAR(star.entry(0, 1), 0.75 * 0.1 / 0.25, 1e-15);
  EXPECT_NEAR(star.entry(1, 0), 0.25 * 0.3 / 0.75, 1e-15);
  EXPECT_NEAR(star.entry(1, 1), 0.9, 1e-15);
  for (std::size_t x = 0; x < 2; ++x) EXPECT_NEAR(star.row(x).sum(), 1.0, 1e-10);
}

TEST(Adjoint, RowsSumToOneAndPreservePi) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const MarkovChain c = chain_of(oracle::random_stochastic(3 + static_cast<int>(s), s + 100));
    const Dist pi = stationary(c);
    const MarkovChain star = adjoint(c, pi);
    for (std::size_t x = 0; x < c.n(); ++x) EXPECT_NEAR(star.row(x).sum(), 1.0, 1e-10);
    EXPECT_LE((star.left_multiply(pi.values()) - pi.values()).lpNorm<1>(), 1e-10);

    // Sparse storage takes the transpose path and must agree.
    const MarkovChain sparse = chain_of(oracle::dense(c), StoragePolicy::Sparse);
    EXPECT_EQ(adjoint(sparse, pi).storage(), Storage::Sparse);
    EXPECT_TRUE(adjoint(sparse, pi).approx_equal(star, 1e-14));
  }
}

TEST(Adjoint, Preconditions) {
  const MarkovChain c = chain_of(testutil::two_state(0.3, 0.1));
  EXPECT_ERROR(ErrorCode::NotStationary, adjoint(c, Dist::uniform(2)));
  const MarkovChain absorbing = validate_chain(std::vector<std::vector<double>>{{1, 0}, {0.5, 0.5}});
  EXPECT_ERROR(ErrorCode::ZeroMassState, adjoint(absorbing, d2(1, 0)));
}

TEST(AdjointDensity, Examples) {
  const MarkovChain c = chain_of(testutil::two_state(0.3, 0.1));
  const Dist pi = d2(0.25, 0.75);
  EXPECT_LE(apply_adjoint_density(c, pi, pi).values().lpNorm<Eigen::Infinity>(), 1e-15);

  // Independent path: mu P by hand, divided by pi.
  const Dist mu = d2(0.9, 0.1);
  const double mp0 = 0.9 * 0.7 + 0.1 * 0.1;
  const double mp1 = 0.9 * 0.3 + 0.1 * 0.9;
  const WeightedFn g = apply_adjoint_density(c, pi, mu);
  EXPECT_NEAR(g[0], mp0 / 0.25 - 1.0, 1e-12);
  EXPECT_NEAR(g[1], mp1 / 0.75 - 1.0, 1e-12);

  // Rank-one chain: mu P = pi for every mu.
  const oracle::Vec rank_pi = oracle::random_dist(5, 2);
  const oracle::Mat rank_one = oracle::Vec::Ones(5) * rank_pi.transpose();
  const WeightedFn zero =
      apply_adjoint_density(chain_of(rank_one), dist_of(rank_pi), dist_of(oracle::random_dist(5, 3)));
  EXPECT_LE(zero.values().lpNorm<Eigen::Infinity>(), 1e-12);
}
