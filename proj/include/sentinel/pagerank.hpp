#pragma once

#include "sentinel/bounds.hpp"
#include "sentinel/chain.hpp"

#include <cstddef>
#include <vector>

namespace sentinel {

enum class PageRankSolver { Resolvent, Series, Power };

inline constexpr double kMinDelta = 1e-12;

struct PageRankConfig {
  Dist mu;
  double delta = 0.15;
  PageRankSolver solver = PageRankSolver::Resolvent;
  double tol = 1e-12;
  std::size_t max_terms = 1'000'000;
};

struct PageRankResult {
  Dist pi_delta;
  /// ||pi_delta P(delta) - pi_delta||_1
  double residual = 0.0;
  /// Series terms or power iterations; 0 for the resolvent.
  std::size_t terms_used = 0;
};

/// P(delta) = (1 - delta) P + delta 1^T mu. Dense chains come back
/// materialized; sparse chains carry the restart part lazily.
MarkovChain build_pagerank(const MarkovChain& chain, const PageRankConfig& config);

/// Stationary distribution of P(delta).
///   Resolvent: pi_delta = delta mu (I - (1 - delta) P)^{-1}.
///   Series:    delta sum_t (1 - delta)^t mu P^t, stopped once the tail
///              mass drops below tol / 2 and renormalized.
///   Power:     nu <- nu P(delta) from mu, stopped once the a-posteriori
///              error (1 - delta) / delta * ||step||_1 is below tol.
/// delta = 0 falls back to the plain stationary solve.
PageRankResult pagerank_stationary(const MarkovChain& chain, const PageRankConfig& config);

/// The series truncated after `last_term` (inclusive), renormalized. Its l1
/// distance to pi_delta is at most 2 (1 - delta)^(last_term + 1).
Dist pagerank_series(const MarkovChain& chain, const Dist& mu, double delta,
                     std::size_t last_term);

/// Balancing damping: sqrt(gamma eps^(1/q) max(log(1/eps), 1) beta /
/// max(log(sup_ratio), 1)) clamped to [1e-12, 1], q the dual of p.
double tune_delta(double gamma, double epsilon, double beta, double p, double sup_ratio);

/// ||pi - pi_delta||_1 <= sqrt(2 ||mu/pi||_inf) exp(-t gamma) + 2 delta t.
/// Holds iff the inequality holds at every supplied t.
BoundReport check_pr_close(const MarkovChain& chain, const Dist& pi, const Dist& mu,
                           double gamma, double delta, const std::vector<std::size_t>& t_values);

struct NormComparison {
  double p = 0.0;
  double lhs = 0.0;  // ||pi_delta / pi||_{p,pi}
  double rhs = 0.0;  // ||mu / pi||_{p,pi}
  bool holds = false;
};

struct ContractionCheck {
  /// p = infinity first, then p = 2 and p = 4.
  std::vector<NormComparison> norms;
  bool holds = false;
};

/// The PageRank density never exceeds the restart density:
/// ||pi_delta / pi||_{p,pi} <= ||mu / pi||_{p,pi} for p in {inf, 2, 4}.
ContractionCheck check_density_contraction(const MarkovChain& chain, const Dist& pi,
                                           const Dist& mu, double delta);

/// ||pi_delta - pi~_delta||_1 <= 2 exp(-delta t) + 2 eps^(1/q) beta t with
/// beta = ||mu/pi||_{p,pi}. Holds iff the inequality holds at every
/// supplied t.
BoundReport check_corrupted_close(const Dist& original_pr, const Dist& corrupted_pr,
                                  const Dist& pi, const Dist& mu, double p, double epsilon,
                                  double delta, const std::vector<std::size_t>& t_values);

/// Same check starting from the base chains: builds both PageRank
/// distributions and measures epsilon against pi.
BoundReport check_corrupted_close(const MarkovChain& original, const MarkovChain& corrupted,
                                  const Dist& pi, const Dist& mu, double p, double delta,
                                  const std::vector<std::size_t>& t_values);

}  // namespace sentinel
