#include "sentinel/pagerank.hpp"

#include "sentinel/corruption.hpp"
#include "sentinel/errors.hpp"
#include "sentinel/geometry.hpp"
#include "sentinel/spectral.hpp"
#include "sentinel/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sentinel {

namespace {

void validate_config(const MarkovChain& chain, const PageRankConfig& config) {
  if (config.mu.size() != chain.n()) {
    throw Error(ErrorCode::SizeMismatch, "restart distribution and chain sizes differ");
  }
  if (!(config.delta >= 0.0 && config.delta <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "damping must lie in [0, 1]", std::nullopt,
                std::nullopt, config.delta);
  }
  if (!(config.tol > 0.0)) throw Error(ErrorCode::OutOfRange, "tolerance must be positive");
}

// nu P(delta) without materializing the mixture.
Vector pagerank_step(const MarkovChain& chain, const Vector& nu, double delta, const Vector& mu) {
  return (1.0 - delta) * chain.left_multiply(nu) + (delta * nu.sum()) * mu;
}

double pagerank_residual(const MarkovChain& chain, const Dist& pi_delta, double delta,
                         const Vector& mu) {
  return (pagerank_step(chain, pi_delta.values(), delta, mu) - pi_delta.values()).lpNorm<1>();
}

BoundReport every_t_report(double lhs, const std::vector<std::size_t>& t_values,
                          const auto& rhs_of_t) {
  BoundReport report;
  report.holds = true;
  for (const std::size_t t : t_values) {
    BoundPoint point;
    point.t = t;
    point.lhs = lhs;
    point.rhs = rhs_of_t(static_cast<double>(t));
    point.holds = point.lhs <= point.rhs + kBoundSlack;
    report.holds = report.holds && point.holds;
    report.points.push_back(point);
  }
  return report;
}

Dist pagerank_distribution(const MarkovChain& chain, const Dist& pi, const Dist& mu,
                           double delta) {
  if (delta == 0.0) return pi;
  return pagerank_stationary(chain, PageRankConfig{mu, delta}).pi_delta;
}

}  // namespace

MarkovChain build_pagerank(const MarkovChain& chain, const PageRankConfig& config) {
  validate_config(chain, config);
  return chain.restart_mixture(config.delta, config.mu.values());
}

PageRankResult pagerank_stationary(const MarkovChain& chain, const PageRankConfig& config) {
  validate_config(chain, config);
  const double delta = config.delta;
  const Vector& mu = config.mu.values();

  if (delta == 0.0) {
    Dist pi = stationary(chain, StationaryMethod::Direct, config.tol);
    const double residual = stationarity_residual(chain, pi);
    return {std::move(pi), residual, 0};
  }

  std::size_t terms = 0;
  Vector values;
  switch (config.solver) {
    case PageRankSolver::Resolvent:
      values = solve_resolvent(chain, delta, mu);
      break;
    case PageRankSolver::Series: {
      // Tail below tol / 2 keeps the renormalized residual under tol.
      Vector term = mu;
      values = delta * mu;
      double weight = 1.0;
      terms = 1;
      while ((weight *= 1.0 - delta) >= 0.5 * config.tol) {
        if (terms >= config.max_terms) {
          throw Error(ErrorCode::NoConvergence, "series exceeded max_terms", terms,
                      std::nullopt, weight);
        }
        term = chain.left_multiply(term);
        values += (delta * weight) * term;
        ++terms;
      }
      break;
    }
    case PageRankSolver::Power: {
      values = mu;
      const double factor = (1.0 - delta) / delta;
      for (;;) {
        if (terms >= config.max_terms) {
          throw Error(ErrorCode::NoConvergence, "power iteration exceeded max_terms", terms);
        }
        Vector next = pagerank_step(chain, values, delta, mu);
        next /= next.sum();
        const double step = (next - values).lpNorm<1>();
        values = std::move(next);
        ++terms;
        if (factor * step < config.tol) break;
      }
      break;
    }
  }

  Dist pi_delta = Dist::from_numeric(std::move(values));
  const double residual = pagerank_residual(chain, pi_delta, delta, mu);
  if (!(residual <= config.tol)) {
    throw Error(ErrorCode::SolveFailure,
                "PageRank residual " + std::to_string(residual) + " exceeds tolerance",
                std::nullopt, std::nullopt, residual);
  }
  return {std::move(pi_delta), residual, terms};
}

Dist pagerank_series(const MarkovChain& chain, const Dist& mu, double delta,
                     std::size_t last_term) {
  if (mu.size() != chain.n()) throw Error(ErrorCode::SizeMismatch, "mu and chain sizes differ");
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "series needs damping in (0, 1]");
  }
  Vector term = mu.values();
  Vector acc = delta * term;
  double weight = 1.0;
  for (std::size_t t = 1; t <= last_term; ++t) {
    weight *= 1.0 - delta;
    term = chain.left_multiply(term);
    acc += (delta * weight) * term;
  }
  return Dist::from_numeric(std::move(acc));
}

double tune_delta(double gamma, double epsilon, double beta, double p, double sup_ratio) {
  if (std::isnan(p) || p <= 1.0) {
    throw Error(ErrorCode::InvalidExponent, "tuning needs p > 1", std::nullopt, std::nullopt, p);
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "gamma must lie in (0, 1]", std::nullopt, std::nullopt,
                gamma);
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(ErrorCode::OutOfRange, "epsilon must lie in (0, 1)", std::nullopt, std::nullopt,
                epsilon);
  }
  if (!(beta >= 1.0) || std::isinf(beta)) {
    throw Error(ErrorCode::OutOfRange, "beta must be finite and >= 1", std::nullopt,
                std::nullopt, beta);
  }
  if (!(sup_ratio >= 1.0) || std::isinf(sup_ratio)) {
    throw Error(ErrorCode::OutOfRange, "sup_ratio must be finite and >= 1", std::nullopt,
                std::nullopt, sup_ratio);
  }
  const double q = dual_exponent(p);
  const double numerator =
      gamma * std::pow(epsilon, 1.0 / q) * std::max(std::log(1.0 / epsilon), 1.0) * beta;
  const double denominator = std::max(std::log(sup_ratio), 1.0);
  return std::clamp(std::sqrt(numerator / denominator), kMinDelta, 1.0);
}

BoundReport check_pr_close(const MarkovChain& chain, const Dist& pi, const Dist& mu,
                           double gamma, double delta, const std::vector<std::size_t>& t_values) {
  if (mu.size() != chain.n()) throw Error(ErrorCode::SizeMismatch, "mu and chain sizes differ");
  const GapResult gap = spectral_gap(chain, pi);
  if (!(gamma >= 0.0 && gamma <= gap.gamma + kBoundSlack)) {
    throw Error(ErrorCode::OutOfRange,
                "gamma exceeds the spectral gap " + std::to_string(gap.gamma), std::nullopt,
                std::nullopt, gamma);
  }
  const double spike = weighted_lp_norm(density_ratio(mu, pi), pi, kInfinity);
  const double lhs = l1_distance(pi, pagerank_distribution(chain, pi, mu, delta));
  const double scale = std::sqrt(2.0 * spike);
  return every_t_report(lhs, t_values, [&](double t) {
    return scale * std::exp(-t * gamma) + 2.0 * delta * t;
  });
}

ContractionCheck check_density_contraction(const MarkovChain& chain, const Dist& pi,
                                           const Dist& mu, double delta) {
  if (pi.size() != chain.n() || mu.size() != chain.n()) {
    throw Error(ErrorCode::SizeMismatch, "distribution and chain sizes differ");
  }
  for (std::size_t x = 0; x < pi.size(); ++x) {
    if (!(pi[x] > 0.0)) throw Error(ErrorCode::ZeroMassState, "pi has no mass at a state", x);
  }
  const Dist pi_delta = pagerank_distribution(chain, pi, mu, delta);
  const Vector pr_ratio = density_ratio(pi_delta, pi);
  const Vector mu_ratio = density_ratio(mu, pi);

  ContractionCheck check;
  check.holds = true;
  for (const double p : {kInfinity, 2.0, 4.0}) {
    NormComparison cmp;
    cmp.p = p;
    cmp.lhs = weighted_lp_norm(pr_ratio, pi, p);
    cmp.rhs = weighted_lp_norm(mu_ratio, pi, p);
    cmp.holds = cmp.lhs <= cmp.rhs + kBoundSlack;
    check.holds = check.holds && cmp.holds;
    check.norms.push_back(cmp);
  }
  return check;
}

BoundReport check_corrupted_close(const Dist& original_pr, const Dist& corrupted_pr,
                                  const Dist& pi, const Dist& mu, double p, double epsilon,
                                  double delta, const std::vector<std::size_t>& t_values) {
  if (!(epsilon >= 0.0 && epsilon <= 2.0)) {
    throw Error(ErrorCode::OutOfRange, "epsilon must lie in [0, 2]", std::nullopt, std::nullopt,
                epsilon);
  }
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "damping must lie in [0, 1]");
  }
  const double q = dual_exponent(p);
  const double beta = smoothness(mu, pi, p);
  const double lhs = l1_distance(original_pr, corrupted_pr);
  const double corruption = std::pow(epsilon, 1.0 / q);
  return every_t_report(lhs, t_values, [&](double t) {
    return 2.0 * std::exp(-delta * t) + 2.0 * corruption * beta * t;
  });
}

BoundReport check_corrupted_close(const MarkovChain& original, const MarkovChain& corrupted,
                                  const Dist& pi, const Dist& mu, double p, double delta,
                                  const std::vector<std::size_t>& t_values) {
  const CorruptionReport report = measure_corruption(original, corrupted, pi);
  const PageRankConfig config{mu, delta};
  const Dist original_pr = pagerank_stationary(original, config).pi_delta;
  const Dist corrupted_pr = pagerank_stationary(corrupted, config).pi_delta;
  return check_corrupted_close(original_pr, corrupted_pr, pi, mu, p,
                               std::min(report.epsilon, 2.0), delta, t_values);
}

}  // namespace sentinel
