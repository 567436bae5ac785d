#pragma once

#include "sentinel/chain.hpp"

#include <limits>

namespace sentinel {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// d_TV(p, q) = (1/2) * ||p - q||_1, in [0, 1].
double tv_distance(const Dist& p, const Dist& q);

/// Raw ||p - q||_1, in [0, 2]. The inequality checkers work in this norm.
double l1_distance(const Dist& p, const Dist& q);

/// (sum_x pi(x) |f(x)|^p)^(1/p); for p = infinity, the max of |f| over the
/// support of pi.
double weighted_lp_norm(const WeightedFn& f, const Dist& pi, double p);
double weighted_lp_norm(const Vector& f, const Dist& pi, double p);

/// Hoelder conjugate p / (p - 1): 1 for p = infinity, infinity for p = 1.
double dual_exponent(double p);

/// The relative density mu / pi. States with mu(x) = pi(x) = 0 map to 0;
/// mu-mass on a pi-null state is an UnsupportedMass error.
Vector density_ratio(const Dist& mu, const Dist& pi);

/// beta = ||mu / pi||_{p, pi}.
double smoothness(const Dist& mu, const Dist& pi, double p);

/// ||pi P - pi||_1.
double stationarity_residual(const MarkovChain& chain, const Dist& pi);

/// Time reversal P*(x, y) = pi(y) P(y, x) / pi(x). Requires pi > 0 and
/// stationary within 1e-8; the result keeps the storage of `chain`.
MarkovChain adjoint(const MarkovChain& chain, const Dist& pi);

/// P* f for f = (mu / pi - 1)^T. Checks the result against mu P / pi - 1
/// computed without the adjoint, and that E_pi[f] = 0.
WeightedFn apply_adjoint_density(const MarkovChain& chain, const Dist& pi, const Dist& mu);

}  // namespace sentinel
