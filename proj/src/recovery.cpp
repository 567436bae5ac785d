#include "sentinel/recovery.hpp"

#include "sentinel/errors.hpp"
#include "sentinel/geometry.hpp"
#include "sentinel/io.hpp"
#include "sentinel/pagerank.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace sentinel {

namespace {

nlohmann::json number_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

std::vector<double> candidate_deltas(double tuned, Refinement refine) {
  if (refine.grid_size <= 1) return {tuned};
  std::vector<double> out;
  const double lo = std::log(tuned / 10.0);
  const double hi = std::log(tuned * 10.0);
  const auto k = static_cast<double>(refine.grid_size - 1);
  for (std::size_t i = 0; i < refine.grid_size; ++i) {
    const double d = std::exp(lo + (hi - lo) * static_cast<double>(i) / k);
    out.push_back(std::clamp(d, kMinDelta, 1.0));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

double min_over_horizon(double scale, double rate, double slope, std::size_t horizon) {
  if (slope == 0.0) return 0.0;
  const auto f = [&](std::size_t t) {
    const double td = static_cast<double>(t);
    return scale * std::exp(-rate * td) + slope * td;
  };
  std::size_t lo = 1;
  std::size_t hi = std::max<std::size_t>(horizon, 1);
  while (hi - lo > 2) {
    const std::size_t m1 = lo + (hi - lo) / 3;
    const std::size_t m2 = hi - (hi - lo) / 3;
    if (f(m1) <= f(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  double best = f(lo);
  for (std::size_t t = lo + 1; t <= hi; ++t) best = std::min(best, f(t));
  return best;
}

CertifiedTerms certified_terms(const RecoveryInputs& inputs, double delta) {
  CertifiedTerms terms;
  terms.bias = min_over_horizon(std::sqrt(2.0 * inputs.sup_ratio), inputs.gamma, 2.0 * delta);
  const double corruption = std::pow(inputs.epsilon, 1.0 / inputs.q);
  terms.corruption = min_over_horizon(2.0, delta, 2.0 * corruption * inputs.beta);
  return terms;
}

RecoveryResult recover(const MarkovChain& corrupted, const Dist& mu, double gamma,
                       double epsilon, double beta, double p, Refinement refine,
                       std::optional<double> sup_ratio) {
  if (mu.size() != corrupted.n()) {
    throw Error(ErrorCode::SizeMismatch, "restart and chain sizes differ");
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "gamma must lie in (0, 1]", std::nullopt, std::nullopt,
                gamma);
  }
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw Error(ErrorCode::OutOfRange, "epsilon must lie in [0, 1)", std::nullopt,
                std::nullopt, epsilon);
  }
  if (!(beta >= 1.0) || std::isinf(beta)) {
    throw Error(ErrorCode::OutOfRange, "beta must be finite and >= 1", std::nullopt,
                std::nullopt, beta);
  }
  if (std::isnan(p) || p <= 1.0) {
    throw Error(ErrorCode::InvalidExponent, "recovery needs p > 1", std::nullopt, std::nullopt, p);
  }

  RecoveryInputs inputs;
  inputs.gamma = gamma;
  inputs.epsilon = epsilon;
  inputs.beta = beta;
  inputs.p = p;
  inputs.q = dual_exponent(p);
  if (sup_ratio) {
    if (!(*sup_ratio >= 1.0) || std::isinf(*sup_ratio)) {
      throw Error(ErrorCode::OutOfRange, "sup_ratio must be finite and >= 1");
    }
    inputs.sup_ratio = *sup_ratio;
  } else if (std::isinf(p)) {
    inputs.sup_ratio = beta;
  } else {
    inputs.sup_ratio = std::numbers::e;
    inputs.sup_ratio_assumed = true;
  }

  const double tuned = epsilon > 0.0 ? tune_delta(gamma, epsilon, beta, p, inputs.sup_ratio)
                                     : kMinDelta;

  // Ties go to the smallest delta; candidates are ascending.
  double best_delta = tuned;
  CertifiedTerms best = certified_terms(inputs, tuned);
  if (refine.grid_size > 1) {
    bool first = true;
    for (const double d : candidate_deltas(tuned, refine)) {
      const CertifiedTerms terms = certified_terms(inputs, d);
      if (first || terms.total() < best.total()) {
        best = terms;
        best_delta = d;
        first = false;
      }
    }
  }

  PageRankResult pr =
      pagerank_stationary(corrupted, PageRankConfig{mu, best_delta, PageRankSolver::Resolvent});

  RecoveryResult result{std::move(pr.pi_delta), 0.0, 0.0, false, {}, {}};
  result.delta_used = best_delta;
  result.certified_bound = 0.5 * best.total();
  result.vacuous = result.certified_bound >= 1.0;
  result.inputs = inputs;
  result.diagnostics.tuned_delta = tuned;
  result.diagnostics.solver_residual = pr.residual;
  result.diagnostics.pagerank_bias_bound = best.bias;
  result.diagnostics.corruption_bound = best.corruption;
  return result;
}

RecoveryResult recover_spread(const MarkovChain& corrupted, double alpha, double epsilon_rows,
                              double gamma, Refinement refine) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "alpha must lie in (0, 1]", std::nullopt, std::nullopt,
                alpha);
  }
  if (!(epsilon_rows >= 0.0 && epsilon_rows <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "row fraction must lie in [0, 1]", std::nullopt,
                std::nullopt, epsilon_rows);
  }
  // An arbitrary row moves at most 2 pi(x) <= 2 / (alpha n) of l1 mass.
  const double epsilon = 2.0 * epsilon_rows / alpha;
  return recover(corrupted, Dist::uniform(corrupted.n()), gamma, epsilon, 1.0 / alpha,
                 kInfinity, refine);
}

void attach_ground_truth(RecoveryResult& result, const Dist& pi) {
  result.diagnostics.realized_tv = tv_distance(result.pi_hat, pi);
}

nlohmann::json to_json(const RecoveryResult& result) {
  nlohmann::json doc;
  doc["pi_hat"] = io::dist_to_json(result.pi_hat);
  doc["delta_used"] = result.delta_used;
  doc["certified_bound"] = result.certified_bound;
  doc["vacuous"] = result.vacuous;
  const auto& in = result.inputs;
  doc["inputs"] = {{"gamma", in.gamma},
                   {"epsilon", in.epsilon},
                   {"beta", in.beta},
                   {"p", number_or_inf(in.p)},
                   {"q", number_or_inf(in.q)},
                   {"sup_ratio", in.sup_ratio},
                   {"sup_ratio_assumed", in.sup_ratio_assumed}};
  const auto& diag = result.diagnostics;
  nlohmann::json d = {{"tuned_delta", diag.tuned_delta},
                      {"solver_residual", diag.solver_residual},
                      {"pagerank_bias_bound_l1", diag.pagerank_bias_bound},
                      {"corruption_bound_l1", diag.corruption_bound}};
  if (diag.realized_tv) d["realized_tv"] = *diag.realized_tv;
  doc["diagnostics"] = std::move(d);
  return doc;
}

}  // namespace sentinel
