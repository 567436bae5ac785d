#include "sentinel/cli.hpp"

#include "sentinel/adversary.hpp"
#include "sentinel/errors.hpp"
#include "sentinel/experiment.hpp"
#include "sentinel/geometry.hpp"
#include "sentinel/io.hpp"
#include "sentinel/pagerank.hpp"
#include "sentinel/recovery.hpp"
#include "sentinel/spectral.hpp"
#include "sentinel/stationary.hpp"
#include "sentinel/verify.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>

namespace sentinel {

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitViolation = 3;

double parse_exponent(const std::string& text) {
  if (text == "inf" || text == "infinity") return kInfinity;
  try {
    std::size_t used = 0;
    const double p = std::stod(text, &used);
    if (used == text.size()) return p;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::ParseError, "p must be a number or \"inf\", got \"" + text + "\"");
}

json parse_inline_or_file(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      return json::parse(text);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, e.what());
    }
  }
  return io::read_json(text);
}

std::string_view method_name(GapMethod m) {
  switch (m) {
    case GapMethod::Auto: return "auto";
    case GapMethod::DenseSvd: return "dense_svd";
    case GapMethod::Iterative: return "iterative";
  }
  return "unknown";
}

// Writes to the file when one was named, otherwise to `out`.
void emit(std::ostream& out, const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    io::write_text(path, text);
  }
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stationary distributions of corrupted Markov chains via PageRank"};
  app.require_subcommand(1);

  std::string chain_path;
  std::string output;
  std::string storage = "auto";
  const std::map<std::string, StoragePolicy> storages{
      {"auto", StoragePolicy::Auto}, {"dense", StoragePolicy::Dense},
      {"sparse", StoragePolicy::Sparse}};

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("chain", chain_path, "Chain JSON file")->required();
    sub->add_option("-o,--output", output, "Write the result here instead of stdout");
    sub->add_option("--storage", storage, "auto, dense or sparse")
        ->check(CLI::IsMember({"auto", "dense", "sparse"}));
  };
  const auto load_chain = [&] { return io::read_chain(chain_path, storages.at(storage)); };

  std::function<int()> action;

  // stationary
  std::string st_method = "direct";
  double st_tol = 1e-10;
  auto* st = app.add_subcommand("stationary", "Stationary distribution");
  add_common(st);
  st->add_option("--method", st_method, "direct or power")
      ->check(CLI::IsMember({"direct", "power"}));
  st->add_option("--tol", st_tol, "Residual tolerance");
  st->callback([&] {
    action = [&] {
      const auto method = st_method == "power" ? StationaryMethod::Power : StationaryMethod::Direct;
      emit(out, output, io::dump(io::dist_to_json(stationary(load_chain(), method, st_tol))));
      return kExitOk;
    };
  });

  // gap
  std::string gap_method = "auto";
  std::string gap_pi;
  auto* gap = app.add_subcommand("gap", "Spectral gap");
  add_common(gap);
  gap->add_option("--method", gap_method, "auto, dense or iterative")
      ->check(CLI::IsMember({"auto", "dense", "iterative"}));
  gap->add_option("--pi", gap_pi, "Stationary distribution file; solved for when absent");
  gap->callback([&] {
    action = [&] {
      const MarkovChain chain = load_chain();
      const Dist pi = gap_pi.empty() ? stationary(chain) : io::read_dist(gap_pi);
      const GapMethod m = gap_method == "dense"       ? GapMethod::DenseSvd
                          : gap_method == "iterative" ? GapMethod::Iterative
                                                      : GapMethod::Auto;
      const GapResult r = spectral_gap(chain, pi, m);
      const json doc = {{"gamma", r.gamma},
                        {"top_singular_value", r.top_singular_value},
                        {"method", method_name(r.method)},
                        {"periodic_suspect", r.periodic_suspect}};
      emit(out, output, io::dump(doc));
      return kExitOk;
    };
  });

  // pagerank
  std::string pr_mu;
  double pr_delta = 0.15;
  double pr_tol = 1e-12;
  std::string pr_solver = "resolvent";
  auto* pr = app.add_subcommand("pagerank", "Stationary distribution of the PageRank chain");
  add_common(pr);
  pr->add_option("--mu", pr_mu, "Restart distribution file")->required();
  pr->add_option("--delta", pr_delta, "Damping in [0, 1]")->required();
  pr->add_option("--solver", pr_solver, "resolvent, series or power")
      ->check(CLI::IsMember({"resolvent", "series", "power"}));
  pr->add_option("--tol", pr_tol, "Residual tolerance");
  pr->callback([&] {
    action = [&] {
      PageRankConfig config{io::read_dist(pr_mu), pr_delta};
      config.tol = pr_tol;
      config.solver = pr_solver == "series"  ? PageRankSolver::Series
                      : pr_solver == "power" ? PageRankSolver::Power
                                             : PageRankSolver::Resolvent;
      const PageRankResult r = pagerank_stationary(load_chain(), config);
      const json doc = {{"pi_delta", io::dist_to_json(r.pi_delta)},
                        {"delta", pr_delta},
                        {"solver", pr_solver},
                        {"residual", r.residual},
                        {"terms_used", r.terms_used}};
      emit(out, output, io::dump(doc));
      return kExitOk;
    };
  });

  // corrupt
  std::string co_spec;
  std::string co_report;
  std::string co_pi;
  auto* co = app.add_subcommand("corrupt", "Apply a seeded corruption");
  add_common(co);
  co->add_option("--spec", co_spec, "Corruption spec as inline JSON or a file")->required();
  co->add_option("--report", co_report, "Write the corruption report here");
  co->add_option("--pi", co_pi, "Stationary distribution file; solved for when absent");
  co->callback([&] {
    action = [&] {
      const MarkovChain chain = load_chain();
      const Dist pi = co_pi.empty() ? stationary(chain) : io::read_dist(co_pi);
      const CorruptionSpec spec = corruption_spec_from_json(parse_inline_or_file(co_spec));
      const CorruptedChain result = corrupt(chain, pi, spec);
      if (!co_report.empty()) {
        const auto& r = result.report;
        json per_row = json::array();
        for (const double v : r.per_row_tv) per_row.push_back(v);
        const json doc = {{"epsilon", r.epsilon},
                          {"per_row_tv", std::move(per_row)},
                          {"corrupted_rows", r.corrupted_rows},
                          {"spec", to_json(spec)}};
        io::write_text(co_report, io::dump(doc));
      }
      emit(out, output, io::dump(io::chain_to_json(result.chain)));
      return kExitOk;
    };
  });

  // recover
  std::string re_mu;
  std::string re_truth;
  std::string re_p = "inf";
  double re_gamma = 0.0;
  double re_eps = 0.0;
  double re_beta = 1.0;
  std::size_t re_refine = 0;
  std::optional<double> re_sup;
  auto* re = app.add_subcommand("recover", "Recover pi from a corrupted chain");
  add_common(re);
  re->add_option("--mu", re_mu, "Restart distribution file")->required();
  re->add_option("--gamma", re_gamma, "Spectral gap lower bound of the clean chain")->required();
  re->add_option("--eps", re_eps, "Corruption level")->required();
  re->add_option("--beta", re_beta, "Smoothness of mu")->required();
  re->add_option("--p", re_p, "Smoothness exponent, a number > 1 or inf")->required();
  re->add_option("--refine", re_refine, "Grid size for the damping search (0 = off)");
  re->add_option("--sup-ratio", re_sup, "Upper bound on ||mu/pi||_inf");
  re->add_option("--truth", re_truth, "Ground-truth pi file, adds the realized error");
  re->callback([&] {
    action = [&] {
      RecoveryResult r = recover(load_chain(), io::read_dist(re_mu), re_gamma, re_eps, re_beta,
                                 parse_exponent(re_p), Refinement::grid(re_refine), re_sup);
      if (!re_truth.empty()) attach_ground_truth(r, io::read_dist(re_truth));
      emit(out, output, io::dump(to_json(r)));
      return kExitOk;
    };
  });

  // verify
  std::string ve_suite;
  VerifyOptions ve_opt;
  auto* ve = app.add_subcommand("verify", "Run an inequality suite on a chain");
  add_common(ve);
  ve->add_option("--suite", ve_suite, "contract, mixing, coupling, prclose or corruptclose")
      ->required()
      ->check(CLI::IsMember({"contract", "mixing", "coupling", "prclose", "corruptclose"}));
  ve->add_option("--seed", ve_opt.seed, "Seed for random test inputs");
  ve->add_option("--trials", ve_opt.trials, "Random cases per suite");
  ve->add_option("--tmax", ve_opt.t_max, "Largest t tried");
  ve->callback([&] {
    action = [&] {
      const Suite suite = suite_from_string(ve_suite);
      const auto cases = run_suite(suite, load_chain(), ve_opt);
      emit(out, output, suite_csv(suite, cases));
      const auto failed = std::count_if(cases.begin(), cases.end(),
                                        [](const SuiteCase& c) { return !c.holds; });
      if (failed > 0) {
        err << "verify: " << failed << " of " << cases.size() << " " << ve_suite
            << " inequalities violated\n";
        return kExitViolation;
      }
      return kExitOk;
    };
  });

  // experiment
  std::string ex_config;
  std::string ex_output;
  auto* ex = app.add_subcommand("experiment", "Run a corruption and recovery sweep");
  ex->add_option("config", ex_config, "Experiment config JSON")->required();
  ex->add_option("-o,--output", ex_output, "CSV destination, overrides the config");
  ex->callback([&] {
    action = [&] {
      const std::filesystem::path path(ex_config);
      ExperimentConfig config =
          experiment_config_from_json(io::read_json(path), path.parent_path());
      if (!ex_output.empty()) config.output = ex_output;
      emit(out, config.output, to_csv(run_experiment(config)));
      return kExitOk;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    return action();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_numerical(e.code()) ? kExitNumerical : kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
}

}  // namespace sentinel
