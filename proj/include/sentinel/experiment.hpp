#pragma once

#include "sentinel/adversary.hpp"
#include "sentinel/chain.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace sentinel {

struct GeneratorSource {
  TestChainKind kind = TestChainKind::LazyComplete;
  std::size_t n = 0;
  /// Fixed seed for every trial; absent means the per-trial seed.
  std::optional<std::uint64_t> seed;
};

struct FileSource {
  std::filesystem::path path;
};

enum class TargetRule {
  /// per_row_tv: every row; other kinds: greedy by ascending pi.
  Default,
  Greedy,
  /// ceil(eps * n) seeded random rows, eps read as a row fraction.
  Fraction,
};

enum class RestartRule { Uniform, Truth, File };

/// A recovery parameter given as a number or taken from ground truth.
using Param = std::optional<double>;

struct ExperimentConfig {
  std::variant<GeneratorSource, FileSource> chain;
  CorruptionKind corruption = CorruptionKind::PerRowTv;
  TargetRule targets = TargetRule::Default;
  RestartRule restart = RestartRule::Uniform;
  std::filesystem::path restart_file;

  Param gamma;
  Param beta;
  double p = 2.0;
  std::optional<double> sup_ratio;
  /// Empty parameters, the recovery epsilon and the sup ratio come from the
  /// clean chain. Without it gamma and beta must be given and the target
  /// epsilon is used.
  bool auto_from_ground_truth = true;

  std::vector<double> eps_grid;
  /// Empty means one tuned damping per cell.
  std::vector<double> delta_grid;
  std::size_t refine = 0;
  std::size_t trials = 1;
  std::uint64_t master_seed = 0;
  /// Empty or "-" writes to the caller's stream.
  std::string output;
  bool record_runtime = false;
};

/// Relative paths inside the config resolve against `base_dir`.
ExperimentConfig experiment_config_from_json(const nlohmann::json& doc,
                                             const std::filesystem::path& base_dir = {});

inline constexpr const char* kExperimentHeader =
    "trial,seed,n,kind,gamma,eps_target,eps_measured,beta,p,delta,tv_pagerank_bias,"
    "tv_corruption_gap,tv_realized,certified_bound,runtime_ms,status";

struct ExperimentRow {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::string kind;
  double gamma = 0.0;
  double eps_target = 0.0;
  double eps_measured = 0.0;
  double beta = 0.0;
  double p = 0.0;
  double delta = 0.0;
  double tv_pagerank_bias = 0.0;
  double tv_corruption_gap = 0.0;
  double tv_realized = 0.0;
  double certified_bound = 0.0;
  double runtime_ms = 0.0;
  /// "ok" or the error name of the failure that stopped the cell.
  std::string status = "ok";
};

/// Worker count from SENTINEL_THREADS (unset or 0 = hardware concurrency).
std::size_t experiment_threads();

/// One row per (trial, eps, delta) cell, sorted by that key. A failing
/// cell becomes a row with its error name and nan in the fields it could
/// not compute.
std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config);

std::string format_double(double v);
std::string to_csv(const std::vector<ExperimentRow>& rows);

}  // namespace sentinel
