#pragma once

#include "sentinel/chain.hpp"
#include "sentinel/corruption.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace sentinel {

enum class CorruptionKind { PerRowTv, RowReplacement, Absorbing };

std::string_view to_string(CorruptionKind kind);
CorruptionKind corruption_kind_from_string(std::string_view name);

struct CorruptionSpec {
  CorruptionKind kind = CorruptionKind::PerRowTv;
  /// Total corruption budget epsilon in [0, 2] (raw l1 convention).
  double budget = 0.0;
  /// Rows to attack. When absent, per_row_tv hits every row and the other
  /// kinds pick rows greedily by ascending pi while pi(C) <= budget / 2.
  std::optional<std::vector<std::size_t>> target_rows;
  std::uint64_t seed = 0;
};

nlohmann::json to_json(const CorruptionSpec& spec);
CorruptionSpec corruption_spec_from_json(const nlohmann::json& doc);

struct CorruptedChain {
  MarkovChain chain;
  /// Measured against pi, not taken from the requested budget.
  CorruptionReport report;
};

/// Applies a seeded corruption. Kinds:
///   per_row_tv      moves budget/2 of mass in each target row from its
///                   largest entries to one seeded random column;
///   row_replacement replaces each target row by a Dirichlet(1) draw;
///   absorbing       turns each target row into a point mass on itself.
CorruptedChain corrupt(const MarkovChain& chain, const Dist& pi, const CorruptionSpec& spec);

/// Rows in ascending (pi, index) order, taken while pi(C) <= budget / 2.
std::vector<std::size_t> greedy_targets(const Dist& pi, double budget);

/// ceil(fraction * n) distinct rows chosen by seed, ascending.
std::vector<std::size_t> random_rows(std::size_t n, double fraction, std::uint64_t seed);

struct StarPair {
  MarkovChain original;
  Dist pi;
  MarkovChain corrupted;
  Dist pi_corrupted;
};

/// Star on n + 1 states, center = 0, distinguished outer node = 1. Both
/// chains hold with probability 1/2 everywhere; outer nodes move to the
/// center. The original center spreads 1/(2n) to each outer node; the
/// corrupted center sends 1/4 to node 1 and 1/(4(n-1)) to the others.
/// Stationary distributions are the closed forms, checked to 1e-12.
StarPair star_pair(std::size_t n);

/// Product chain on {-1, 1}^n (state bit i set = coordinate i is +1): pick
/// a coordinate uniformly and resample it to +1 with probability p_i.
MarkovChain product_chain(const std::vector<double>& p_vec);
/// Its stationary distribution, the product of the coordinate biases.
Dist product_measure(const std::vector<double>& p_vec);

enum class TestChainKind { LazyComplete, LazyCycle, RandomReversible, RandomDense };

std::string_view to_string(TestChainKind kind);
TestChainKind test_chain_kind_from_string(std::string_view name);

struct TestChain {
  MarkovChain chain;
  Dist pi;
};

/// Irreducible aperiodic chains with their stationary distributions.
///   lazy_complete     P = I/2 + J/(2n), pi uniform, gamma = 1/2.
///   lazy_cycle        hold 1/2, step left or right 1/4, pi uniform.
///   random_reversible Metropolis chain for a seeded pi in [0.5, 1.5]/Z.
///   random_dense      rows of i.i.d. exponentials, pi solved directly.
/// Above the dense limit the random kinds use a ring plus seeded chords.
TestChain make_test_chain(TestChainKind kind, std::size_t n, std::uint64_t seed);

}  // namespace sentinel
