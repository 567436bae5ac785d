#include "sentinel/spectral.hpp"

#include "sentinel/errors.hpp"
#include "sentinel/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace sentinel {

namespace {

constexpr double kIterativeTolerance = 1e-9;
constexpr Eigen::Index kKrylovDimension = 64;
constexpr int kMaxRestarts = 50;

void require_gap_inputs(const MarkovChain& chain, const Dist& pi) {
  if (pi.size() != chain.n()) throw Error(ErrorCode::SizeMismatch, "pi and chain sizes differ");
  for (std::size_t x = 0; x < pi.size(); ++x) {
    if (!(pi[x] > 0.0)) throw Error(ErrorCode::ZeroMassState, "pi has no mass at a state", x);
  }
  const double residual = stationarity_residual(chain, pi);
  if (!(residual <= kStationaryTolerance)) {
    throw Error(ErrorCode::NotStationary, "||pi P - pi||_1 = " + std::to_string(residual),
                std::nullopt, std::nullopt, residual);
  }
}

double dense_top_singular_value(const MarkovChain& chain, const Vector& root) {
  DenseMatrix a = chain.to_dense();
  for (Eigen::Index x = 0; x < a.rows(); ++x) {
    a.row(x) = a.row(x).cwiseQuotient(root.transpose()) * root[x];
  }
  Eigen::MatrixXd m = a;
  m.noalias() -= root * root.transpose();
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()[0];
}

/// Lanczos with full reorthogonalization on the symmetric operator
/// K = M^T M, M = A - s s^T, restarted from the top Ritz vector.
double iterative_top_singular_value(const MarkovChain& chain, const Vector& root) {
  const auto n = root.size();
  const auto deflate = [&](Vector& v) { v -= root * root.dot(v); };
  const auto apply_m = [&](const Vector& g) {
    Vector y = chain.apply(g.cwiseQuotient(root)).cwiseProduct(root);
    deflate(y);
    return y;
  };
  const auto apply_mt = [&](const Vector& h) {
    Vector y = chain.left_multiply(h.cwiseProduct(root)).cwiseQuotient(root);
    deflate(y);
    return y;
  };

  Vector start(n);
  for (Eigen::Index i = 0; i < n; ++i) start[i] = 1.0 + 0.5 * std::sin(static_cast<double>(i + 1));
  deflate(start);
  if (start.norm() == 0.0) return 0.0;
  start.normalize();

  const Eigen::Index dim = std::min<Eigen::Index>(kKrylovDimension, n);
  double previous = -1.0;
  for (int restart = 0; restart < kMaxRestarts; ++restart) {
    Eigen::MatrixXd basis(n, dim);
    Vector alpha = Vector::Zero(dim);
    Vector beta = Vector::Zero(dim);
    basis.col(0) = start;
    Eigen::Index steps = 0;
    double theta = 0.0;
    Vector ritz;
    bool invariant = false;
    for (Eigen::Index k = 0; k < dim; ++k) {
      Vector w = apply_mt(apply_m(basis.col(k)));
      alpha[k] = basis.col(k).dot(w);
      for (int pass = 0; pass < 2; ++pass) {
        w -= basis.leftCols(k + 1) * (basis.leftCols(k + 1).transpose() * w);
      }
      deflate(w);
      beta[k] = w.norm();
      steps = k + 1;

      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(steps, steps);
      for (Eigen::Index i = 0; i < steps; ++i) {
        t(i, i) = alpha[i];
        if (i + 1 < steps) t(i, i + 1) = t(i + 1, i) = beta[i];
      }
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t);
      theta = eig.eigenvalues()[steps - 1];
      ritz = eig.eigenvectors().col(steps - 1);
      const double residual = std::abs(beta[k] * ritz[steps - 1]);
      if (beta[k] <= 1e-14 * std::max(1.0, std::abs(theta)) ||
          residual <= kIterativeTolerance * std::max(theta, 1e-300)) {
        invariant = true;
        break;
      }
      if (k + 1 < dim) basis.col(k + 1) = w / beta[k];
    }
    if (invariant || std::abs(theta - previous) <= 1e-15 * std::max(1.0, theta)) {
      return std::sqrt(std::max(theta, 0.0));
    }
    previous = theta;
    start = basis.leftCols(steps) * ritz;
    deflate(start);
    start.normalize();
  }
  throw Error(ErrorCode::IterativeNoConvergence, "Lanczos did not converge");
}

}  // namespace

GapResult spectral_gap(const MarkovChain& chain, const Dist& pi, GapMethod method) {
  require_gap_inputs(chain, pi);
  const Vector root = pi.values().cwiseSqrt();
  if (method == GapMethod::Auto) {
    method = chain.n() <= kDenseLimit ? GapMethod::DenseSvd : GapMethod::Iterative;
  }
  GapResult result;
  result.method = method;
  result.top_singular_value = method == GapMethod::DenseSvd
                                  ? dense_top_singular_value(chain, root)
                                  : iterative_top_singular_value(chain, root);
  const double raw = 1.0 - result.top_singular_value;
  result.periodic_suspect = raw <= kBoundSlack;
  result.gamma = std::clamp(raw, 0.0, 1.0);
  return result;
}

std::vector<Vector> iterate_powers(const MarkovChain& chain, const Vector& nu,
                                   const std::vector<std::size_t>& t_values) {
  std::vector<std::size_t> order(t_values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return t_values[a] < t_values[b]; });
  std::vector<Vector> out(t_values.size());
  Vector current = nu;
  std::size_t t = 0;
  for (const std::size_t idx : order) {
    for (; t < t_values[idx]; ++t) current = chain.left_multiply(current);
    out[idx] = current;
  }
  return out;
}

BoundReport check_mixing_bound(const MarkovChain& chain, const Dist& pi, const Dist& mu,
                               double gamma, const std::vector<std::size_t>& t_values) {
  if (mu.size() != chain.n()) throw Error(ErrorCode::SizeMismatch, "mu and chain sizes differ");
  const GapResult gap = spectral_gap(chain, pi);
  if (!(gamma >= 0.0 && gamma <= gap.gamma + kBoundSlack)) {
    throw Error(ErrorCode::OutOfRange,
                "gamma exceeds the spectral gap " + std::to_string(gap.gamma), std::nullopt,
                std::nullopt, gamma);
  }
  const double spike = weighted_lp_norm(density_ratio(mu, pi), pi, kInfinity);
  const double scale = std::sqrt(2.0 * spike);

  BoundReport report;
  report.holds = true;
  const auto iterates = iterate_powers(chain, mu.values(), t_values);
  for (std::size_t k = 0; k < t_values.size(); ++k) {
    BoundPoint point;
    point.t = t_values[k];
    point.lhs = (pi.values() - iterates[k]).lpNorm<1>();
    point.rhs = std::pow(1.0 - gamma, static_cast<double>(point.t)) * scale;
    point.holds = point.lhs <= point.rhs + kBoundSlack;
    report.holds = report.holds && point.holds;
    report.points.push_back(point);
  }
  return report;
}

BoundReport check_coupling_bound(const MarkovChain& chain, const Dist& pi, const Dist& nu,
                                 const std::vector<std::size_t>& t_values) {
  if (nu.size() != chain.n() || pi.size() != chain.n()) {
    throw Error(ErrorCode::SizeMismatch, "distribution and chain sizes differ");
  }
  const double residual = stationarity_residual(chain, pi);
  if (!(residual <= kStationaryTolerance)) {
    throw Error(ErrorCode::NotStationary, "||pi P - pi||_1 = " + std::to_string(residual),
                std::nullopt, std::nullopt, residual);
  }
  const double lhs = l1_distance(pi, nu);
  const double drift = (nu.values() - chain.left_multiply(nu.values())).lpNorm<1>();

  BoundReport report;
  report.holds = true;
  const auto iterates = iterate_powers(chain, nu.values(), t_values);
  for (std::size_t k = 0; k < t_values.size(); ++k) {
    BoundPoint point;
    point.t = t_values[k];
    point.lhs = lhs;
    point.rhs = (pi.values() - iterates[k]).lpNorm<1>() + static_cast<double>(point.t) * drift;
    point.holds = point.lhs <= point.rhs + kBoundSlack;
    report.holds = report.holds && point.holds;
    report.points.push_back(point);
  }
  return report;
}

}  // namespace sentinel
