#pragma once

#include "sentinel/bounds.hpp"
#include "sentinel/chain.hpp"

#include <cstddef>
#include <vector>

namespace sentinel {

enum class GapMethod { Auto, DenseSvd, Iterative };

struct GapResult {
  /// 1 - top_singular_value, clamped to [0, 1].
  double gamma = 0.0;
  double top_singular_value = 0.0;
  GapMethod method = GapMethod::DenseSvd;
  /// Set when the unclamped gap is not positive.
  bool periodic_suspect = false;
};

/// gamma = 1 - sup { ||Pf||_{2,pi} / ||f||_{2,pi} : E_pi[f] = 0 }.
///
/// In coordinates g = D^{1/2} f (D = diag(pi)) the sup is the operator
/// norm of A = D^{1/2} P D^{-1/2} restricted to the complement of s =
/// sqrt(pi). A maps that complement into itself and A s = s, so the sup is
/// the largest singular value of A - s s^T. Auto picks the dense SVD up to
/// the dense limit and Lanczos on (A - s s^T)^T (A - s s^T) above it.
GapResult spectral_gap(const MarkovChain& chain, const Dist& pi,
                       GapMethod method = GapMethod::Auto);

/// ||pi - mu P^t||_1 <= (1 - gamma)^t sqrt(2 ||mu/pi||_inf) for each t.
/// Requires gamma <= spectral_gap(chain, pi) + 1e-10. Holds iff every t holds.
BoundReport check_mixing_bound(const MarkovChain& chain, const Dist& pi, const Dist& mu,
                               double gamma, const std::vector<std::size_t>& t_values);

/// ||pi - nu||_1 <= ||pi - nu P^t||_1 + t ||nu - nu P||_1 for each t.
/// Holds iff every t holds.
BoundReport check_coupling_bound(const MarkovChain& chain, const Dist& pi, const Dist& nu,
                                 const std::vector<std::size_t>& t_values);

/// nu P^t for every requested t, in the order given.
std::vector<Vector> iterate_powers(const MarkovChain& chain, const Vector& nu,
                                   const std::vector<std::size_t>& t_values);

}  // namespace sentinel
