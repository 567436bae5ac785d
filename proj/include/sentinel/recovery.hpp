#pragma once

#include "sentinel/chain.hpp"

#include <json.hpp>

#include <cstddef>
#include <optional>

namespace sentinel {

inline constexpr std::size_t kDefaultGridSize = 9;
inline constexpr std::size_t kMaxCouplingHorizon = 1'000'000;

/// How the damping is chosen: the tuned value alone, or the best certified
/// bound over `grid_size` log-spaced candidates in [delta*/10, 10 delta*].
struct Refinement {
  std::size_t grid_size = 0;

  static Refinement none() { return {0}; }
  static Refinement grid(std::size_t k = kDefaultGridSize) { return {k}; }
};

struct RecoveryInputs {
  double gamma = 0.0;
  double epsilon = 0.0;
  double beta = 1.0;
  double p = 0.0;
  double q = 0.0;
  /// Assumed upper bound on ||mu/pi||_inf.
  double sup_ratio = 1.0;
  /// True when sup_ratio was not supplied for finite p and the floor e was
  /// used; the certificate then assumes ||mu/pi||_inf <= e.
  bool sup_ratio_assumed = false;
};

struct RecoveryDiagnostics {
  double tuned_delta = 0.0;
  double solver_residual = 0.0;
  /// min_t over the PageRank-bias bound, l1.
  double pagerank_bias_bound = 0.0;
  /// min_t over the corruption bound, l1.
  double corruption_bound = 0.0;
  /// d_TV(pi_hat, pi), filled in by attach_ground_truth only.
  std::optional<double> realized_tv;
};

struct RecoveryResult {
  Dist pi_hat;
  double delta_used = 0.0;
  /// Bound on d_TV(pi_hat, pi): half the sum of the two l1 bounds.
  double certified_bound = 0.0;
  /// certified_bound >= 1, i.e. the guarantee says nothing.
  bool vacuous = false;
  RecoveryInputs inputs;
  RecoveryDiagnostics diagnostics;
};

/// min over integer t in [1, horizon] of scale * exp(-rate t) + slope * t.
/// The function is convex in t, so an integer ternary search suffices.
/// A zero slope gives the infimum 0 (t -> infinity).
double min_over_horizon(double scale, double rate, double slope,
                        std::size_t horizon = kMaxCouplingHorizon);

/// Certified l1 bounds (bias, corruption) at a given damping.
struct CertifiedTerms {
  double bias = 0.0;
  double corruption = 0.0;
  double total() const { return bias + corruption; }
};
CertifiedTerms certified_terms(const RecoveryInputs& inputs, double delta);

/// PageRank of the corrupted chain with restart mu and tuned damping.
/// Uses only its arguments: neither the clean chain nor pi is consulted.
/// For p = infinity the sup ratio is beta; otherwise pass it explicitly or
/// accept the floor e.
RecoveryResult recover(const MarkovChain& corrupted, const Dist& mu, double gamma,
                       double epsilon, double beta, double p,
                       Refinement refine = Refinement::none(),
                       std::optional<double> sup_ratio = std::nullopt);

/// Uniform restart for chains known to satisfy alpha/n <= pi(x) <=
/// 1/(alpha n): beta = 1/alpha, p = infinity, and corrupting an
/// epsilon_rows fraction of rows costs at most 2 epsilon_rows / alpha.
RecoveryResult recover_spread(const MarkovChain& corrupted, double alpha, double epsilon_rows,
                              double gamma, Refinement refine = Refinement::none());

/// Records d_TV(pi_hat, pi) in the diagnostics.
void attach_ground_truth(RecoveryResult& result, const Dist& pi);

nlohmann::json to_json(const RecoveryResult& result);

}  // namespace sentinel
