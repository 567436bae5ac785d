#pragma once

#include "sentinel/chain.hpp"

#include <cstddef>

namespace sentinel {

enum class StationaryMethod { Power, Direct };

inline constexpr std::size_t kMaxPowerIterations = 1'000'000;

/// Stationary distribution pi with ||pi P - pi||_1 <= tol.
///
/// Direct solves pi (P - I) = 0 with sum(pi) = 1. Dense chains first count
/// the singular values of P - I below 1e-8 * ||P||; more than one means the
/// stationary distribution is not unique. Power iterates nu <- nu P from
/// the uniform start until successive iterates differ by less than tol.
Dist stationary(const MarkovChain& chain, StationaryMethod method = StationaryMethod::Direct,
                double tol = 1e-10, std::size_t max_iter = kMaxPowerIterations);

/// Solves x (I - (1 - delta) P) = delta * mu for the row vector x. Shared
/// by the direct stationary solve of restart mixtures and by PageRank.
Vector solve_resolvent(const MarkovChain& chain, double delta, const Vector& mu);

}  // namespace sentinel
