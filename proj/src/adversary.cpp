#include "sentinel/adversary.hpp"

#include "sentinel/errors.hpp"
#include "sentinel/geometry.hpp"
#include "sentinel/random.hpp"
#include "sentinel/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

namespace sentinel {

namespace {

using Row = std::vector<std::pair<std::size_t, double>>;

std::vector<Row> to_rows(const MarkovChain& chain) {
  std::vector<Row> rows(chain.n());
  for (const auto& t : chain.triplets()) rows[t.row].emplace_back(t.col, t.prob);
  return rows;
}

MarkovChain from_rows(std::size_t n, const std::vector<Row>& rows, StoragePolicy policy) {
  std::vector<Triplet> triplets;
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [col, prob] : rows[i]) {
      if (prob != 0.0) triplets.push_back({i, col, prob});
    }
  }
  return validate_chain(n, std::move(triplets), kRowTolerance, policy);
}

StoragePolicy same_storage(const MarkovChain& chain) {
  return chain.storage() == Storage::Dense ? StoragePolicy::Dense : StoragePolicy::Sparse;
}

void shift_mass(Row& row, std::size_t target, double amount) {
  std::vector<std::size_t> donors;
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (row[k].first != target && row[k].second > 0.0) donors.push_back(k);
  }
  std::stable_sort(donors.begin(), donors.end(),
                   [&](std::size_t a, std::size_t b) { return row[a].second > row[b].second; });
  double moved = 0.0;
  for (const std::size_t k : donors) {
    if (moved >= amount) break;
    const double take = std::min(row[k].second, amount - moved);
    row[k].second -= take;
    moved += take;
  }
  auto it = std::find_if(row.begin(), row.end(), [&](const auto& e) { return e.first == target; });
  if (it == row.end()) {
    row.emplace_back(target, moved);
    std::sort(row.begin(), row.end());
  } else {
    it->second += moved;
  }
}

Row dirichlet_row(std::size_t n, Rng& rng) {
  Row row(n);
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    row[j] = {j, rng.exponential()};
    total += row[j].second;
  }
  for (auto& entry : row) entry.second /= total;
  return row;
}

void require_close(const MarkovChain& chain, const Dist& pi, const char* what) {
  const double residual = stationarity_residual(chain, pi);
  if (!(residual <= 1e-12)) {
    throw Error(ErrorCode::IdentityViolation, std::string(what) + " is not stationary",
                std::nullopt, std::nullopt, residual);
  }
}

}  // namespace

std::string_view to_string(CorruptionKind kind) {
  switch (kind) {
    case CorruptionKind::PerRowTv: return "per_row_tv";
    case CorruptionKind::RowReplacement: return "row_replacement";
    case CorruptionKind::Absorbing: return "absorbing";
  }
  return "unknown";
}

CorruptionKind corruption_kind_from_string(std::string_view name) {
  if (name == "per_row_tv") return CorruptionKind::PerRowTv;
  if (name == "row_replacement") return CorruptionKind::RowReplacement;
  if (name == "absorbing") return CorruptionKind::Absorbing;
  throw Error(ErrorCode::ParseError, "unknown corruption kind \"" + std::string(name) + "\"");
}

nlohmann::json to_json(const CorruptionSpec& spec) {
  nlohmann::json doc;
  doc["kind"] = std::string(to_string(spec.kind));
  doc["budget"] = spec.budget;
  if (spec.target_rows) doc["target_rows"] = *spec.target_rows;
  doc["seed"] = spec.seed;
  return doc;
}

CorruptionSpec corruption_spec_from_json(const nlohmann::json& doc) {
  try {
    CorruptionSpec spec;
    spec.kind = corruption_kind_from_string(doc.at("kind").get<std::string>());
    spec.budget = doc.at("budget").get<double>();
    if (doc.contains("target_rows") && !doc["target_rows"].is_null()) {
      spec.target_rows = doc["target_rows"].get<std::vector<std::size_t>>();
    }
    spec.seed = doc.value("seed", std::uint64_t{0});
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("corruption spec: ") + e.what());
  }
}

std::vector<std::size_t> greedy_targets(const Dist& pi, double budget) {
  std::vector<std::size_t> order(pi.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pi[a] < pi[b]; });
  std::vector<std::size_t> chosen;
  double mass = 0.0;
  for (const std::size_t x : order) {
    if (mass + pi[x] > 0.5 * budget) break;
    mass += pi[x];
    chosen.push_back(x);
  }
  if (chosen.empty()) {
    throw Error(ErrorCode::BudgetInfeasible, "no row fits within pi(C) <= budget / 2",
                std::nullopt, std::nullopt, budget);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

std::vector<std::size_t> random_rows(std::size_t n, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "row fraction must lie in [0, 1]");
  }
  const auto count = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  Rng rng(seed);
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < count; ++i) std::swap(rows[i], rows[i + rng.index(n - i)]);
  rows.resize(count);
  std::sort(rows.begin(), rows.end());
  return rows;
}

CorruptedChain corrupt(const MarkovChain& chain, const Dist& pi, const CorruptionSpec& spec) {
  const std::size_t n = chain.n();
  if (pi.size() != n) throw Error(ErrorCode::SizeMismatch, "pi and chain sizes differ");
  if (!(spec.budget >= 0.0 && spec.budget <= 2.0)) {
    throw Error(ErrorCode::OutOfRange, "budget must lie in [0, 2]", std::nullopt, std::nullopt,
                spec.budget);
  }
  if (spec.target_rows) {
    for (const std::size_t x : *spec.target_rows) {
      if (x >= n) throw Error(ErrorCode::IndexOutOfBounds, "target row outside chain", x);
    }
  }
  if (spec.budget == 0.0 && spec.kind == CorruptionKind::PerRowTv) {
    return {chain, measure_corruption(chain, chain, pi)};
  }
  if (spec.budget == 0.0 && !spec.target_rows) {
    return {chain, measure_corruption(chain, chain, pi)};
  }

  Rng rng(spec.seed);
  std::vector<Row> rows = to_rows(chain);
  std::vector<std::size_t> targets;
  if (spec.target_rows) {
    targets = *spec.target_rows;
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  } else if (spec.kind == CorruptionKind::PerRowTv) {
    targets.resize(n);
    std::iota(targets.begin(), targets.end(), std::size_t{0});
  } else {
    targets = greedy_targets(pi, spec.budget);
  }

  for (const std::size_t x : targets) {
    switch (spec.kind) {
      case CorruptionKind::PerRowTv:
        shift_mass(rows[x], rng.index(n), 0.5 * spec.budget);
        break;
      case CorruptionKind::RowReplacement:
        rows[x] = dirichlet_row(n, rng);
        break;
      case CorruptionKind::Absorbing:
        rows[x] = {{x, 1.0}};
        break;
    }
  }

  MarkovChain corrupted = from_rows(n, rows, same_storage(chain));
  CorruptionReport report = measure_corruption(chain, corrupted, pi);
  const bool budgeted = spec.kind == CorruptionKind::PerRowTv || !spec.target_rows;
  if (budgeted && report.epsilon > spec.budget + 1e-10) {
    throw Error(ErrorCode::IdentityViolation, "measured corruption exceeds the budget",
                std::nullopt, std::nullopt, report.epsilon);
  }
  return {std::move(corrupted), std::move(report)};
}

StarPair star_pair(std::size_t n) {
  if (n < 2) throw Error(ErrorCode::OutOfRange, "star needs at least two outer nodes", n);
  const double outer = static_cast<double>(n);
  std::vector<Triplet> original;
  std::vector<Triplet> corrupted;
  original.push_back({0, 0, 0.5});
  corrupted.push_back({0, 0, 0.5});
  for (std::size_t k = 1; k <= n; ++k) {
    original.push_back({0, k, 1.0 / (2.0 * outer)});
    corrupted.push_back({0, k, k == 1 ? 0.25 : 1.0 / (4.0 * (outer - 1.0))});
    for (auto* list : {&original, &corrupted}) {
      list->push_back({k, 0, 0.5});
      list->push_back({k, k, 0.5});
    }
  }

  Vector pi(static_cast<Eigen::Index>(n + 1));
  Vector pi_c(static_cast<Eigen::Index>(n + 1));
  pi[0] = pi_c[0] = 0.5;
  for (std::size_t k = 1; k <= n; ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    pi[i] = 1.0 / (2.0 * outer);
    pi_c[i] = k == 1 ? 0.25 : 1.0 / (4.0 * (outer - 1.0));
  }

  StarPair pair{validate_chain(n + 1, std::move(original)), Dist::from_values(std::move(pi)),
                validate_chain(n + 1, std::move(corrupted)),
                Dist::from_values(std::move(pi_c))};
  require_close(pair.original, pair.pi, "star original");
  require_close(pair.corrupted, pair.pi_corrupted, "star corruption");
  return pair;
}

namespace {

void check_biases(const std::vector<double>& p_vec) {
  if (p_vec.empty()) throw Error(ErrorCode::OutOfRange, "product chain needs a coordinate");
  if (p_vec.size() > 20) {
    throw Error(ErrorCode::StateSpaceTooLarge, "product chain limited to 20 coordinates",
                p_vec.size());
  }
  for (std::size_t i = 0; i < p_vec.size(); ++i) {
    if (!(p_vec[i] > 0.0 && p_vec[i] < 1.0)) {
      throw Error(ErrorCode::OutOfRange, "coordinate bias must lie in (0, 1)", i, std::nullopt,
                  p_vec[i]);
    }
  }
}

}  // namespace

MarkovChain product_chain(const std::vector<double>& p_vec) {
  check_biases(p_vec);
  const std::size_t coords = p_vec.size();
  const std::size_t states = std::size_t{1} << coords;
  const double pick = 1.0 / static_cast<double>(coords);
  std::vector<Triplet> triplets;
  triplets.reserve(states * (coords + 1));
  for (std::size_t s = 0; s < states; ++s) {
    double stay = 0.0;
    std::vector<Triplet> flips;
    for (std::size_t i = 0; i < coords; ++i) {
      const std::size_t bit = std::size_t{1} << i;
      const bool up = (s & bit) != 0;
      stay += pick * (up ? p_vec[i] : 1.0 - p_vec[i]);
      flips.push_back({s, s ^ bit, pick * (up ? 1.0 - p_vec[i] : p_vec[i])});
    }
    triplets.push_back({s, s, stay});
    triplets.insert(triplets.end(), flips.begin(), flips.end());
  }
  return validate_chain(states, std::move(triplets));
}

Dist product_measure(const std::vector<double>& p_vec) {
  check_biases(p_vec);
  const std::size_t states = std::size_t{1} << p_vec.size();
  Vector v(static_cast<Eigen::Index>(states));
  for (std::size_t s = 0; s < states; ++s) {
    double mass = 1.0;
    for (std::size_t i = 0; i < p_vec.size(); ++i) {
      mass *= (s >> i) & 1U ? p_vec[i] : 1.0 - p_vec[i];
    }
    v[static_cast<Eigen::Index>(s)] = mass;
  }
  return Dist::from_values(std::move(v));
}

std::string_view to_string(TestChainKind kind) {
  switch (kind) {
    case TestChainKind::LazyComplete: return "lazy_complete";
    case TestChainKind::LazyCycle: return "lazy_cycle";
    case TestChainKind::RandomReversible: return "random_reversible";
    case TestChainKind::RandomDense: return "random_dense";
  }
  return "unknown";
}

TestChainKind test_chain_kind_from_string(std::string_view name) {
  if (name == "lazy_complete") return TestChainKind::LazyComplete;
  if (name == "lazy_cycle") return TestChainKind::LazyCycle;
  if (name == "random_reversible") return TestChainKind::RandomReversible;
  if (name == "random_dense") return TestChainKind::RandomDense;
  throw Error(ErrorCode::ParseError, "unknown chain kind \"" + std::string(name) + "\"");
}

namespace {

// Symmetric neighbor lists: all pairs below the dense limit, otherwise a
// ring plus three seeded chords per state.
std::vector<std::pair<std::size_t, std::size_t>> edge_set(std::size_t n, Rng& rng) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  if (n <= kDenseLimit) {
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = x + 1; y < n; ++y) edges.emplace_back(x, y);
    }
    return edges;
  }
  for (std::size_t x = 0; x < n; ++x) {
    edges.emplace_back(std::min(x, (x + 1) % n), std::max(x, (x + 1) % n));
    for (int k = 0; k < 3; ++k) {
      const std::size_t y = rng.index(n);
      if (y != x) edges.emplace_back(std::min(x, y), std::max(x, y));
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

TestChain random_reversible(std::size_t n, Rng& rng) {
  Vector target(static_cast<Eigen::Index>(n));
  for (auto& v : target) v = 0.5 + rng.uniform();
  target /= target.sum();

  const auto edges = edge_set(n, rng);
  std::vector<double> weights(edges.size());
  std::vector<double> degree(n, 0.0);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    weights[e] = rng.uniform();
    degree[edges[e].first] += weights[e];
    degree[edges[e].second] += weights[e];
  }
  // Symmetric proposal Q = W / max degree; accept with min(1, pi(y)/pi(x)).
  const double scale = 2.0 * *std::max_element(degree.begin(), degree.end());
  std::vector<Triplet> triplets;
  std::vector<double> moving(n, 0.0);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [x, y] = edges[e];
    const double flow = weights[e] / scale *
                        std::min(target[static_cast<Eigen::Index>(x)],
                                 target[static_cast<Eigen::Index>(y)]);
    const double pxy = flow / target[static_cast<Eigen::Index>(x)];
    const double pyx = flow / target[static_cast<Eigen::Index>(y)];
    triplets.push_back({x, y, pxy});
    triplets.push_back({y, x, pyx});
    moving[x] += pxy;
    moving[y] += pyx;
  }
  for (std::size_t x = 0; x < n; ++x) triplets.push_back({x, x, 1.0 - moving[x]});
  return {validate_chain(n, std::move(triplets)), Dist::from_values(std::move(target))};
}

TestChain random_dense(std::size_t n, Rng& rng) {
  std::vector<Triplet> triplets;
  for (std::size_t x = 0; x < n; ++x) {
    std::map<std::size_t, double> row;
    if (n <= kDenseLimit) {
      for (std::size_t y = 0; y < n; ++y) row[y] = rng.exponential();
    } else {
      row[x] = rng.exponential();
      row[(x + 1) % n] += rng.exponential();
      for (int k = 0; k < 8; ++k) row[rng.index(n)] += rng.exponential();
    }
    double total = 0.0;
    for (const auto& [y, w] : row) total += w;
    for (const auto& [y, w] : row) triplets.push_back({x, y, w / total});
  }
  MarkovChain chain = validate_chain(n, std::move(triplets));
  Dist pi = stationary(chain, StationaryMethod::Direct, 1e-12);
  return {std::move(chain), std::move(pi)};
}

}  // namespace

TestChain make_test_chain(TestChainKind kind, std::size_t n, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorCode::OutOfRange, "test chains need at least two states", n);
  Rng rng(seed);
  const double size = static_cast<double>(n);
  switch (kind) {
    case TestChainKind::LazyComplete: {
      if (n <= kDenseLimit) {
        DenseMatrix m = DenseMatrix::Constant(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n), 0.5 / size);
        m.diagonal().array() += 0.5;
        return {validate_chain(m), Dist::uniform(n)};
      }
      std::vector<Triplet> triplets;
      triplets.reserve(n * n);
      for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
          triplets.push_back({x, y, 0.5 / size + (x == y ? 0.5 : 0.0)});
        }
      }
      return {validate_chain(n, std::move(triplets)), Dist::uniform(n)};
    }
    case TestChainKind::LazyCycle: {
      std::vector<Triplet> triplets;
      for (std::size_t x = 0; x < n; ++x) {
        triplets.push_back({x, x, 0.5});
        if (n == 2) {
          triplets.push_back({x, 1 - x, 0.5});
        } else {
          triplets.push_back({x, (x + 1) % n, 0.25});
          triplets.push_back({x, (x + n - 1) % n, 0.25});
        }
      }
      return {validate_chain(n, std::move(triplets)), Dist::uniform(n)};
    }
    case TestChainKind::RandomReversible:
      return random_reversible(n, rng);
    case TestChainKind::RandomDense:
      return random_dense(n, rng);
  }
  throw Error(ErrorCode::OutOfRange, "unknown test chain kind");
}

}  // namespace sentinel
