#include "sentinel/experiment.hpp"

#include "sentinel/errors.hpp"
#include "sentinel/geometry.hpp"
#include "sentinel/io.hpp"
#include "sentinel/pagerank.hpp"
#include "sentinel/random.hpp"
#include "sentinel/recovery.hpp"
#include "sentinel/spectral.hpp"
#include "sentinel/stationary.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

namespace sentinel {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void bad_config(const std::string& what) {
  throw Error(ErrorCode::ParseError, "experiment config: " + what);
}

double read_exponent(const json& v) {
  if (v.is_string() && (v == "inf" || v == "infinity")) return kInfinity;
  if (v.is_number()) return v.get<double>();
  bad_config("p must be a number or \"inf\"");
}

Param read_param(const json& section, const char* key) {
  if (!section.contains(key) || section[key].is_null()) return std::nullopt;
  const json& v = section[key];
  if (v.is_string() && v == "auto") return std::nullopt;
  if (!v.is_number()) bad_config(std::string(key) + " must be a number or \"auto\"");
  return v.get<double>();
}

std::vector<double> read_grid(const json& doc, const char* key) {
  if (!doc.contains(key)) bad_config(std::string("missing ") + key);
  const json& v = doc[key];
  if (v.is_string() && v == "auto") return {};
  if (!v.is_array() || v.empty()) bad_config(std::string(key) + " must be a nonempty array");
  std::vector<double> grid;
  for (const auto& x : v) {
    if (!x.is_number()) bad_config(std::string(key) + " entries must be numbers");
    grid.push_back(x.get<double>());
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

struct Trial {
  std::uint64_t seed = 0;
  std::optional<TestChain> truth;
  std::optional<Dist> mu;
  double gamma = kNaN;
  double beta = kNaN;
  double sup_ratio = kNaN;
  std::string status = "ok";
};

struct Cell {
  std::size_t trial = 0;
  std::size_t eps_index = 0;
  /// Index into the delta grid; absent for a tuned damping.
  std::optional<std::size_t> delta_index;
};

std::string status_of(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const Error& err) {
    return std::string(error_name(err.code()));
  } catch (const std::exception&) {
    return "InternalError";
  }
}

template <typename F>
void parallel_for(std::size_t count, F&& body) {
  const std::size_t workers = std::min(experiment_threads(), std::max<std::size_t>(count, 1));
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) body(i);
  };
  if (workers <= 1) {
    work();
    return;
  }
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
}

Trial prepare_trial(const ExperimentConfig& config, std::size_t index,
                    const std::optional<TestChain>& loaded, const std::optional<Dist>& mu_file) {
  Trial trial;
  trial.seed = mix_seed(config.master_seed, index);
  if (const auto* gen = std::get_if<GeneratorSource>(&config.chain)) {
    trial.truth = make_test_chain(gen->kind, gen->n, gen->seed.value_or(trial.seed));
  } else {
    trial.truth = loaded;
  }
  const Dist& pi = trial.truth->pi;
  switch (config.restart) {
    case RestartRule::Uniform: trial.mu = Dist::uniform(pi.size()); break;
    case RestartRule::Truth: trial.mu = pi; break;
    case RestartRule::File: trial.mu = *mu_file; break;
  }
  if (trial.mu->size() != pi.size()) {
    throw Error(ErrorCode::SizeMismatch, "restart and chain sizes differ");
  }
  if (config.gamma) {
    trial.gamma = *config.gamma;
  } else {
    trial.gamma = spectral_gap(trial.truth->chain, pi).gamma;
  }
  if (config.beta) {
    trial.beta = *config.beta;
  } else {
    trial.beta = std::max(1.0, smoothness(*trial.mu, pi, config.p));
  }
  if (config.sup_ratio) {
    trial.sup_ratio = *config.sup_ratio;
  } else if (config.auto_from_ground_truth) {
    trial.sup_ratio =
        std::max(1.0, weighted_lp_norm(density_ratio(*trial.mu, pi), pi, kInfinity));
  }
  return trial;
}

void run_cell(const ExperimentConfig& config, const Trial& trial, const Cell& cell,
              ExperimentRow& row) {
  const TestChain& truth = *trial.truth;
  const std::size_t n = truth.chain.n();
  const double eps = config.eps_grid[cell.eps_index];

  CorruptionSpec spec;
  spec.kind = config.corruption;
  spec.budget = eps;
  spec.seed = mix_seed(trial.seed, cell.eps_index);
  if (config.targets == TargetRule::Greedy) {
    spec.target_rows = greedy_targets(truth.pi, eps);
  } else if (config.targets == TargetRule::Fraction) {
    spec.target_rows = random_rows(n, std::min(eps, 1.0), spec.seed);
  }
  const CorruptedChain corrupted = corrupt(truth.chain, truth.pi, spec);
  row.eps_measured = corrupted.report.epsilon;

  const auto start = std::chrono::steady_clock::now();
  const double eps_used = config.auto_from_ground_truth ? row.eps_measured : eps;
  Dist pi_hat = truth.pi;
  if (!cell.delta_index) {
    const std::optional<double> sup =
        std::isnan(trial.sup_ratio) ? std::nullopt : std::optional<double>(trial.sup_ratio);
    RecoveryResult result = recover(corrupted.chain, *trial.mu, trial.gamma, eps_used,
                                    trial.beta, config.p, Refinement::grid(config.refine), sup);
    row.delta = result.delta_used;
    row.certified_bound = result.certified_bound;
    pi_hat = std::move(result.pi_hat);
  } else {
    row.delta = config.delta_grid[*cell.delta_index];
    RecoveryInputs inputs;
    inputs.gamma = trial.gamma;
    inputs.epsilon = eps_used;
    inputs.beta = trial.beta;
    inputs.p = config.p;
    inputs.q = dual_exponent(config.p);
    if (!std::isnan(trial.sup_ratio)) {
      inputs.sup_ratio = trial.sup_ratio;
    } else if (std::isinf(config.p)) {
      inputs.sup_ratio = trial.beta;
    } else {
      inputs.sup_ratio = std::exp(1.0);
    }
    pi_hat = pagerank_stationary(corrupted.chain, PageRankConfig{*trial.mu, row.delta}).pi_delta;
    row.certified_bound = 0.5 * certified_terms(inputs, row.delta).total();
  }
  if (config.record_runtime) {
    row.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
  }

  const Dist clean_pr =
      pagerank_stationary(truth.chain, PageRankConfig{*trial.mu, row.delta}).pi_delta;
  row.tv_pagerank_bias = tv_distance(truth.pi, clean_pr);
  row.tv_corruption_gap = tv_distance(clean_pr, pi_hat);
  row.tv_realized = tv_distance(pi_hat, truth.pi);
}

}  // namespace

ExperimentConfig experiment_config_from_json(const json& doc,
                                             const std::filesystem::path& base_dir) {
  if (!doc.is_object()) bad_config("expected an object");
  ExperimentConfig config;
  try {
    const json& chain = doc.at("chain");
    if (chain.contains("generator")) {
      const json& g = chain["generator"];
      GeneratorSource gen;
      gen.kind = test_chain_kind_from_string(g.at("kind").get<std::string>());
      gen.n = g.at("n").get<std::size_t>();
      if (g.contains("seed")) gen.seed = g["seed"].get<std::uint64_t>();
      config.chain = gen;
    } else if (chain.contains("file")) {
      config.chain = FileSource{resolve(base_dir, chain["file"].get<std::string>())};
    } else {
      bad_config("chain needs \"generator\" or \"file\"");
    }

    const json& corruption = doc.at("corruption");
    config.corruption = corruption_kind_from_string(corruption.at("kind").get<std::string>());
    const std::string targets = corruption.value("targets", "default");
    if (targets == "default") {
      config.targets = TargetRule::Default;
    } else if (targets == "greedy") {
      config.targets = TargetRule::Greedy;
    } else if (targets == "fraction") {
      config.targets = TargetRule::Fraction;
    } else {
      bad_config("unknown targets rule \"" + targets + "\"");
    }

    const json restart = doc.value("restart", json("uniform"));
    if (restart.is_object() && restart.contains("file")) {
      config.restart = RestartRule::File;
      config.restart_file = resolve(base_dir, restart["file"].get<std::string>());
    } else if (restart == "uniform") {
      config.restart = RestartRule::Uniform;
    } else if (restart == "truth") {
      config.restart = RestartRule::Truth;
    } else {
      bad_config("restart must be \"uniform\", \"truth\" or {\"file\": ...}");
    }

    const json recovery = doc.value("recovery", json::object());
    config.gamma = read_param(recovery, "gamma");
    config.beta = read_param(recovery, "beta");
    if (recovery.contains("p")) config.p = read_exponent(recovery["p"]);
    if (recovery.contains("sup_ratio")) config.sup_ratio = recovery["sup_ratio"].get<double>();
    config.auto_from_ground_truth = recovery.value("auto_from_ground_truth", true);

    config.eps_grid = read_grid(doc, "eps_grid");
    if (config.eps_grid.empty()) bad_config("eps_grid cannot be \"auto\"");
    config.delta_grid = doc.contains("delta_grid") ? read_grid(doc, "delta_grid")
                                                   : std::vector<double>{};
    config.refine = doc.value("refine", std::size_t{0});
    config.trials = doc.value("trials", std::size_t{1});
    config.master_seed = doc.value("master_seed", std::uint64_t{0});
    config.output = doc.value("output", std::string{});
    if (!config.output.empty() && config.output != "-") {
      config.output = resolve(base_dir, config.output).string();
    }
    config.record_runtime = doc.value("record_runtime", false);
  } catch (const json::exception& e) {
    bad_config(e.what());
  }

  if (config.trials < 1) bad_config("trials must be at least 1");
  if (!config.auto_from_ground_truth && (!config.gamma || !config.beta)) {
    bad_config("gamma and beta are required without auto_from_ground_truth");
  }
  for (const double e : config.eps_grid) {
    if (!(e >= 0.0 && e <= 2.0)) {
      throw Error(ErrorCode::OutOfRange, "eps_grid entries must lie in [0, 2]", std::nullopt,
                  std::nullopt, e);
    }
  }
  for (const double d : config.delta_grid) {
    if (!(d > 0.0 && d <= 1.0)) {
      throw Error(ErrorCode::OutOfRange, "delta_grid entries must lie in (0, 1]", std::nullopt,
                  std::nullopt, d);
    }
  }
  if (std::isnan(config.p) || config.p <= 1.0) {
    throw Error(ErrorCode::InvalidExponent, "recovery needs p > 1", std::nullopt, std::nullopt,
                config.p);
  }
  return config;
}

std::size_t experiment_threads() {
  std::size_t requested = 0;
  if (const char* env = std::getenv("SENTINEL_THREADS")) {
    requested = static_cast<std::size_t>(std::strtoull(env, nullptr, 10));
  }
  if (requested == 0) requested = std::max(1u, std::thread::hardware_concurrency());
  return requested;
}

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& input) {
  ExperimentConfig config = input;
  for (auto* grid : {&config.eps_grid, &config.delta_grid}) {
    std::sort(grid->begin(), grid->end());
    grid->erase(std::unique(grid->begin(), grid->end()), grid->end());
  }
  if (config.eps_grid.empty()) throw Error(ErrorCode::ParseError, "eps_grid is empty");
  if (config.trials < 1) throw Error(ErrorCode::ParseError, "trials must be at least 1");

  // Shared inputs are loaded once; a failure here fails every cell.
  std::optional<TestChain> loaded;
  std::optional<Dist> mu_file;
  std::string shared_status = "ok";
  try {
    if (const auto* file = std::get_if<FileSource>(&config.chain)) {
      MarkovChain chain = io::read_chain(file->path);
      Dist pi = stationary(chain);
      loaded = TestChain{std::move(chain), std::move(pi)};
    }
    if (config.restart == RestartRule::File) mu_file = io::read_dist(config.restart_file);
  } catch (...) {
    shared_status = status_of(std::current_exception());
  }

  std::vector<Trial> trials(config.trials);
  parallel_for(config.trials, [&](std::size_t t) {
    if (shared_status != "ok") {
      trials[t].seed = mix_seed(config.master_seed, t);
      trials[t].status = shared_status;
      return;
    }
    try {
      trials[t] = prepare_trial(config, t, loaded, mu_file);
    } catch (...) {
      trials[t].seed = mix_seed(config.master_seed, t);
      trials[t].status = status_of(std::current_exception());
    }
  });

  std::vector<Cell> cells;
  for (std::size_t t = 0; t < config.trials; ++t) {
    for (std::size_t e = 0; e < config.eps_grid.size(); ++e) {
      if (config.delta_grid.empty()) {
        cells.push_back({t, e, std::nullopt});
      } else {
        for (std::size_t d = 0; d < config.delta_grid.size(); ++d) cells.push_back({t, e, d});
      }
    }
  }

  std::vector<ExperimentRow> rows(cells.size());
  parallel_for(cells.size(), [&](std::size_t i) {
    const Cell& cell = cells[i];
    const Trial& trial = trials[cell.trial];
    ExperimentRow& row = rows[i];
    row.trial = cell.trial;
    row.seed = trial.seed;
    row.kind = std::string(to_string(config.corruption));
    row.p = config.p;
    row.eps_target = config.eps_grid[cell.eps_index];
    row.gamma = trial.gamma;
    row.beta = trial.beta;
    row.n = trial.truth ? trial.truth->chain.n() : 0;
    row.eps_measured = row.tv_pagerank_bias = row.tv_corruption_gap = row.tv_realized =
        row.certified_bound = kNaN;
    row.delta = cell.delta_index ? config.delta_grid[*cell.delta_index] : kNaN;
    if (trial.status != "ok") {
      row.status = trial.status;
      return;
    }
    try {
      run_cell(config, trial, cell, row);
    } catch (...) {
      row.status = status_of(std::current_exception());
    }
  });
  return rows;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_csv(const std::vector<ExperimentRow>& rows) {
  std::ostringstream out;
  out << kExperimentHeader << '\n';
  for (const auto& r : rows) {
    out << r.trial << ',' << r.seed << ',' << r.n << ',' << r.kind << ','
        << format_double(r.gamma) << ',' << format_double(r.eps_target) << ','
        << format_double(r.eps_measured) << ',' << format_double(r.beta) << ','
        << format_double(r.p) << ',' << format_double(r.delta) << ','
        << format_double(r.tv_pagerank_bias) << ',' << format_double(r.tv_corruption_gap) << ','
        << format_double(r.tv_realized) << ',' << format_double(r.certified_bound) << ','
        << format_double(r.runtime_ms) << ',' << r.status << '\n';
  }
  return out.str();
}

}  // namespace sentinel
