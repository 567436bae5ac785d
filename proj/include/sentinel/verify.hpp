#pragma once

#include "sentinel/chain.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sentinel {

enum class Suite { Contract, Mixing, Coupling, PrClose, CorruptClose };

std::string_view to_string(Suite suite);
Suite suite_from_string(std::string_view name);

struct VerifyOptions {
  std::uint64_t seed = 0;
  std::size_t trials = 20;
  /// Largest t tried by the time-indexed inequalities.
  std::size_t t_max = 200;
};

/// One checked inequality; for time-indexed bounds lhs/rhs are taken at the
/// tightest t.
struct SuiteCase {
  std::size_t index = 0;
  std::string label;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// Runs the named inequality checkers on `chain` with seeded random test
/// functions, start distributions and corruptions.
///   contract      ||Pf||_{p,pi} <= ||f||_{p,pi}, p in {1, 2, 4, inf}
///   mixing        ||pi - mu P^t||_1 <= (1 - gamma)^t sqrt(2 ||mu/pi||_inf)
///   coupling      ||pi - nu||_1 <= ||pi - nu P^t||_1 + t ||nu - nu P||_1
///   prclose       PageRank closeness and density contraction, mu uniform
///   corruptclose  closeness of the corrupted PageRank, p in {2, inf}
std::vector<SuiteCase> run_suite(Suite suite, const MarkovChain& chain,
                                 const VerifyOptions& options);

std::string suite_csv(Suite suite, const std::vector<SuiteCase>& cases);

}  // namespace sentinel
