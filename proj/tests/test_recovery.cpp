#include "test_util.hpp"

#include "sentinel/adversary.hpp"
#include "sentinel/geometry.hpp"
#include "sentinel/io.hpp"
#include "sentinel/pagerank.hpp"
#include "sentinel/recovery.hpp"
#include "sentinel/spectral.hpp"
#include "sentinel/stationary.hpp"

#include <cmath>
#include <random>

using namespace sentinel;
using testutil::dist_of;

namespace {

CorruptedChain absorb(const TestChain& t, double fraction, std::uint64_t seed) {
  CorruptionSpec spec{CorruptionKind::Absorbing, 2.0, random_rows(t.chain.n(), fraction, seed), seed};
  return corrupt(t.chain, t.pi, spec);
}

}  // namespace

TEST(MinOverHorizon, MatchesExhaustiveSearch) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const double scale = 0.5 + 3 * u(gen);
    const double rate = std::pow(10.0, -3 * u(gen));
    const double slope = std::pow(10.0, -5 * u(gen));
    double best = 1e300;
    for (std::size_t t = 1; t <= 20000; ++t) {
      best = std::min(best, scale * std::exp(-rate * static_cast<double>(t)) + slope * static_cast<double>(t));
    }
    EXPECT_NEAR(min_over_horizon(scale, rate, slope, 20000), best, 1e-15 * best + 1e-300);
  }
  EXPECT_EQ(min_over_horizon(2.0, 0.1, 0.0), 0.0);
}

TEST(Recover, NoCorruptionExactRestart) {
  const TestChain t = make_test_chain(TestChainKind::RandomReversible, 30, 3);
  const double gamma = spectral_gap(t.chain, t.pi).gamma;
  const RecoveryResult r = recover(t.chain, t.pi, gamma, 0.0, 1.0, kInfinity);
  EXPECT_LE(l1_distance(r.pi_hat, t.pi), 1e-10);
  EXPECT_EQ(r.delta_used, kMinDelta);
  EXPECT_LT(r.certified_bound, 1e-9);
  EXPECT_EQ(r.diagnostics.corruption_bound, 0.0);
  EXPECT_FALSE(r.vacuous);
}

TEST(Recover, AbsorbingRowsLazyComplete) {
  const TestChain t = make_test_chain(TestChainKind::LazyComplete, 64, 0);
  const CorruptedChain c = absorb(t, 0.05, 11);
  ASSERT_EQ(c.report.corrupted_rows.size(), 4u);
  RecoveryResult r = recover(c.chain, Dist::uniform(64), 0.5, c.report.epsilon, 1.0, kInfinity);
  attach_ground_truth(r, t.pi);
  EXPECT_LE(*r.diagnostics.realized_tv, r.certified_bound + 1e-8);
  EXPECT_LT(*r.diagnostics.realized_tv, 0.9);

  const Dist naive = stationary(c.chain, StationaryMethod::Power);
  EXPECT_GE(tv_distance(naive, t.pi), 0.9);
  // With several absorbing states the direct solve refuses.
  EXPECT_ERROR(ErrorCode::NonUniqueStationary, stationary(c.chain));
}

TEST(Recover, RegularizationBeatsNaiveAtSmallEpsilon) {
  // Two absorbing rows of lazy_complete(512) keep the measured epsilon
  // under 0.01; the certificate alone then rules out the naive answer.
  const TestChain t = make_test_chain(TestChainKind::LazyComplete, 512, 0);
  const CorruptedChain c = absorb(t, 2.0 / 512, 4);
  ASSERT_LE(c.report.epsilon, 0.01);
  RecoveryResult r = recover(c.chain, Dist::uniform(512), 0.5, c.report.epsilon, 1.0, kInfinity);
  attach_ground_truth(r, t.pi);
  EXPECT_LT(r.certified_bound, 0.9);
  EXPECT_LE(*r.diagnostics.realized_tv, r.certified_bound);
  EXPECT_GE(tv_distance(stationary(c.chain, StationaryMethod::Power), t.pi), 0.9);
}

TEST(Recover, StarPairBoundHolds) {
  const StarPair s = star_pair(100);
  const double gamma = spectral_gap(s.original, s.pi).gamma;
  const double eps = measure_corruption(s.original, s.corrupted, s.pi).epsilon;
  const Dist mu = Dist::uniform(101);
  const double beta = smoothness(mu, s.pi, kInfinity);
  RecoveryResult r = recover(s.corrupted, mu, gamma, eps, beta, kInfinity, Refinement::grid());
  attach_ground_truth(r, s.pi);
  EXPECT_LE(*r.diagnostics.realized_tv, r.certified_bound + 1e-8);
}

TEST(Recover, CertificateIsSoundOnRandomTrials) {
  int trials = 0;
  for (std::uint64_t s = 0; s < 12; ++s) {
    const auto kind = s % 2 ? TestChainKind::RandomReversible : TestChainKind::RandomDense;
    const TestChain t = make_test_chain(kind, 40, s);
    const double gamma = spectral_gap(t.chain, t.pi).gamma;
    const Dist mu = dist_of(oracle::random_dist(40, s + 500));
    const double sup = weighted_lp_norm(density_ratio(mu, t.pi), t.pi, kInfinity);
    for (const auto ck : {CorruptionKind::PerRowTv, CorruptionKind::RowReplacement,
                          CorruptionKind::Absorbing}) {
      CorruptionSpec spec{ck, 0.05, std::nullopt, s};
      if (ck == CorruptionKind::Absorbing) spec.target_rows = random_rows(40, 0.05, s);
      const CorruptedChain c = corrupt(t.chain, t.pi, spec);
      for (const double p : {2.0, kInfinity}) {
        const double beta = std::max(1.0, smoothness(mu, t.pi, p));
        RecoveryResult r = recover(c.chain, mu, gamma, c.report.epsilon, beta, p,
                                   Refinement::grid(), sup);
        attach_ground_truth(r, t.pi);
        EXPECT_LE(*r.diagnostics.realized_tv, r.certified_bound + 1e-8);
        ++trials;
      }
    }
  }
  EXPECT_EQ(trials, 72);
}

TEST(Recover, RefinementNeverWorsensTheBound) {
  const TestChain t = make_test_chain(TestChainKind::LazyComplete, 32, 0);
  const CorruptedChain c = absorb(t, 0.05, 2);
  for (const double eps : {0.001, 0.01, 0.05}) {
    const RecoveryResult plain = recover(c.chain, Dist::uniform(32), 0.5, eps, 1.0, kInfinity);
    const RecoveryResult grid =
        recover(c.chain, Dist::uniform(32), 0.5, eps, 1.0, kInfinity, Refinement::grid(9));
    EXPECT_LE(grid.certified_bound, plain.certified_bound + 1e-15);
    EXPECT_GE(grid.delta_used, plain.delta_used / 10 * (1 - 1e-12));
    EXPECT_LE(grid.delta_used, plain.delta_used * 10 * (1 + 1e-12));
    EXPECT_EQ(grid.diagnostics.tuned_delta, plain.delta_used);
  }
}

TEST(Recover, FiniteExponentSupRatio) {
  const TestChain t = make_test_chain(TestChainKind::LazyComplete, 16, 0);
  const RecoveryResult assumed = recover(t.chain, Dist::uniform(16), 0.5, 0.01, 1.0, 2.0);
  EXPECT_TRUE(assumed.inputs.sup_ratio_assumed);
  EXPECT_NEAR(assumed.inputs.sup_ratio, std::exp(1.0), 1e-15);
  EXPECT_EQ(assumed.inputs.q, 2.0);
  const RecoveryResult given = recover(t.chain, Dist::uniform(16), 0.5, 0.01, 1.0, 2.0,
                                       Refinement::none(), 1.0);
  EXPECT_FALSE(given.inputs.sup_ratio_assumed);
  const RecoveryResult inf = recover(t.chain, Dist::uniform(16), 0.5, 0.01, 3.0, kInfinity);
  EXPECT_EQ(inf.inputs.sup_ratio, 3.0);
  EXPECT_EQ(inf.inputs.q, 1.0);
}

TEST(Recover, DeterministicAndOblivious) {
  const TestChain t = make_test_chain(TestChainKind::RandomDense, 50, 9);
  const CorruptedChain c = absorb(t, 0.04, 1);
  const Dist mu = Dist::uniform(50);
  const auto run = [&] {
    return io::dump(to_json(recover(c.chain, mu, 0.3, 0.02, 1.5, 2.0, Refinement::grid())));
  };
  EXPECT_EQ(run(), run());
}

TEST(Recover, Preconditions) {
  const TestChain t = make_test_chain(TestChainKind::LazyComplete, 8, 0);
  const Dist mu = Dist::uniform(8);
  EXPECT_ERROR(ErrorCode::OutOfRange, recover(t.chain, mu, 0.0, 0.1, 1.0, 2.0));
  EXPECT_ERROR(ErrorCode::OutOfRange, recover(t.chain, mu, 0.5, 1.0, 1.0, 2.0));
  EXPECT_ERROR(ErrorCode::OutOfRange, recover(t.chain, mu, 0.5, 0.1, 0.9, 2.0));
  EXPECT_ERROR(ErrorCode::InvalidExponent, recover(t.chain, mu, 0.5, 0.1, 1.0, 1.0));
  EXPECT_ERROR(ErrorCode::SizeMismatch, recover(t.chain, Dist::uniform(7), 0.5, 0.1, 1.0, 2.0));
  EXPECT_ERROR(ErrorCode::OutOfRange,
               recover(t.chain, mu, 0.5, 0.1, 1.0, 2.0, Refinement::none(), 0.5));
}

TEST(Recover, VacuousFlag) {
  const TestChain t = make_test_chain(TestChainKind::LazyComplete, 8, 0);
  const RecoveryResult r = recover(t.chain, Dist::uniform(8), 0.01, 0.5, 10.0, 2.0);
  EXPECT_GE(r.certified_bound, 1.0);
  EXPECT_TRUE(r.vacuous);
}

TEST(Recover, JsonOutput) {
  const TestChain t = make_test_chain(TestChainKind::LazyComplete, 8, 0);
  RecoveryResult r = recover(t.chain, Dist::uniform(8), 0.5, 0.01, 1.0, kInfinity);
  auto doc = to_json(r);
  EXPECT_EQ(doc["inputs"]["p"], "inf");
  EXPECT_EQ(doc["inputs"]["q"], 1.0);
  EXPECT_FALSE(doc["diagnostics"].contains("realized_tv"));
  attach_ground_truth(r, t.pi);
  doc = to_json(r);
  EXPECT_TRUE(doc["diagnostics"].contains("realized_tv"));
  EXPECT_EQ(io::dist_from_json(doc["pi_hat"]), r.pi_hat);
}

TEST(RecoverSpread, ParameterMapping) {
  const TestChain t = make_test_chain(TestChainKind::LazyComplete, 128, 0);
  const CorruptedChain c = absorb(t, 0.03, 5);
  ASSERT_EQ(c.report.corrupted_rows.size(), 4u);
  const double rows = 4.0 / 128;
  RecoveryResult r = recover_spread(c.chain, 1.0, rows, 0.5);
  // Each arbitrary row can move up to 2 pi(x) of l1 mass.
  EXPECT_NEAR(r.inputs.epsilon, 2 * rows, 1e-15);
  EXPECT_LE(c.report.epsilon, r.inputs.epsilon);
  EXPECT_EQ(r.inputs.beta, 1.0);
  EXPECT_TRUE(std::isinf(r.inputs.p));
  attach_ground_truth(r, t.pi);
  EXPECT_LE(*r.diagnostics.realized_tv, r.certified_bound + 1e-8);

  const RecoveryResult half = recover_spread(c.chain, 0.5, rows, 0.5);
  EXPECT_NEAR(half.inputs.epsilon, 4 * rows, 1e-15);
  EXPECT_EQ(half.inputs.beta, 2.0);
}

TEST(RecoverSpread, ZeroRowsLeavesBiasTermOnly) {
  const TestChain t = make_test_chain(TestChainKind::LazyComplete, 32, 0);
  const RecoveryResult r = recover_spread(t.chain, 1.0, 0.0, 0.5);
  EXPECT_EQ(r.diagnostics.corruption_bound, 0.0);
  EXPECT_NEAR(r.certified_bound, 0.5 * r.diagnostics.pagerank_bias_bound, 1e-18);
  EXPECT_ERROR(ErrorCode::OutOfRange, recover_spread(t.chain, 0.0, 0.1, 0.5));
  EXPECT_ERROR(ErrorCode::OutOfRange, recover_spread(t.chain, 1.0, 1.5, 0.5));
}
