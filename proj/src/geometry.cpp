#include "sentinel/geometry.hpp"

#include "sentinel/errors.hpp"

#include <cmath>
#include <string>

namespace sentinel {

namespace {

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorCode::LengthMismatch,
                "lengths " + std::to_string(a) + " and " + std::to_string(b) + " differ");
  }
}

void require_positive(const Dist& pi) {
  for (std::size_t x = 0; x < pi.size(); ++x) {
    if (!(pi[x] > 0.0)) throw Error(ErrorCode::ZeroMassState, "pi has no mass at a state", x);
  }
}

void require_stationary(const MarkovChain& chain, const Dist& pi) {
  if (pi.size() != chain.n()) {
    throw Error(ErrorCode::SizeMismatch, "distribution and chain sizes differ");
  }
  const double residual = stationarity_residual(chain, pi);
  if (!(residual <= kStationaryTolerance)) {
    throw Error(ErrorCode::NotStationary, "||pi P - pi||_1 = " + std::to_string(residual),
                std::nullopt, std::nullopt, residual);
  }
}

}  // namespace

double l1_distance(const Dist& p, const Dist& q) {
  require_same_length(p.size(), q.size());
  return (p.values() - q.values()).lpNorm<1>();
}

double tv_distance(const Dist& p, const Dist& q) { return 0.5 * l1_distance(p, q); }

double weighted_lp_norm(const Vector& f, const Dist& pi, double p) {
  require_same_length(static_cast<std::size_t>(f.size()), pi.size());
  if (std::isnan(p) || p < 1.0) {
    throw Error(ErrorCode::InvalidExponent, "exponent must be >= 1", std::nullopt, std::nullopt, p);
  }
  double largest = 0.0;
  for (Eigen::Index x = 0; x < f.size(); ++x) {
    if (pi.values()[x] > 0.0) largest = std::max(largest, std::abs(f[x]));
  }
  if (std::isinf(p) || largest == 0.0) return largest;
  // Scale by the largest value so high exponents do not overflow.
  double acc = 0.0;
  for (Eigen::Index x = 0; x < f.size(); ++x) {
    const double w = pi.values()[x];
    if (w > 0.0) acc += w * std::pow(std::abs(f[x]) / largest, p);
  }
  return largest * std::pow(acc, 1.0 / p);
}

double weighted_lp_norm(const WeightedFn& f, const Dist& pi, double p) {
  return weighted_lp_norm(f.values(), pi, p);
}

double dual_exponent(double p) {
  if (std::isnan(p) || p < 1.0) {
    throw Error(ErrorCode::InvalidExponent, "exponent must be >= 1", std::nullopt, std::nullopt, p);
  }
  if (std::isinf(p)) return 1.0;
  if (p == 1.0) return kInfinity;
  return p / (p - 1.0);
}

Vector density_ratio(const Dist& mu, const Dist& pi) {
  require_same_length(mu.size(), pi.size());
  Vector ratio(static_cast<Eigen::Index>(mu.size()));
  for (std::size_t x = 0; x < mu.size(); ++x) {
    const auto i = static_cast<Eigen::Index>(x);
    if (pi[x] > 0.0) {
      ratio[i] = mu[x] / pi[x];
    } else if (mu[x] > 0.0) {
      throw Error(ErrorCode::UnsupportedMass, "mu charges a state where pi is zero", x,
                  std::nullopt, mu[x]);
    } else {
      ratio[i] = 0.0;
    }
  }
  return ratio;
}

double smoothness(const Dist& mu, const Dist& pi, double p) {
  return weighted_lp_norm(density_ratio(mu, pi), pi, p);
}

double stationarity_residual(const MarkovChain& chain, const Dist& pi) {
  if (pi.size() != chain.n()) {
    throw Error(ErrorCode::SizeMismatch, "distribution and chain sizes differ");
  }
  return (chain.left_multiply(pi.values()) - pi.values()).lpNorm<1>();
}

MarkovChain adjoint(const MarkovChain& chain, const Dist& pi) {
  require_stationary(chain, pi);
  require_positive(pi);
  const Vector& w = pi.values();

  MarkovChain result = [&] {
    if (chain.sparse_base() && !chain.is_composite()) {
      // P* = D^{-1} P^T D
      SparseMatrix t = SparseMatrix(chain.sparse_base()->transpose());
      for (Eigen::Index x = 0; x < t.outerSize(); ++x) {
        double sum = 0.0;
        for (SparseMatrix::InnerIterator it(t, x); it; ++it) {
          it.valueRef() *= w[it.col()] / w[x];
          sum += it.value();
        }
        for (SparseMatrix::InnerIterator it(t, x); it; ++it) it.valueRef() /= sum;
      }
      return MarkovChain::from_sparse_unchecked(std::move(t), chain.row_tolerance(),
                                                StoragePolicy::Sparse);
    }
    if (chain.n() > kDenseLimit) {
      throw Error(ErrorCode::OutOfRange,
                  "adjoint of a lazy restart mixture is only formed up to the dense limit");
    }
    DenseMatrix m = chain.to_dense().transpose();
    for (Eigen::Index x = 0; x < m.rows(); ++x) {
      m.row(x) = m.row(x).cwiseProduct(w.transpose()) / w[x];
      m.row(x) /= m.row(x).sum();
    }
    const auto policy = chain.storage() == Storage::Dense ? StoragePolicy::Dense
                                                           : StoragePolicy::Sparse;
    return MarkovChain::from_dense_unchecked(std::move(m), chain.row_tolerance(), policy);
  }();

  const double residual = stationarity_residual(result, pi);
  if (!(residual <= 2.0 * kStationaryTolerance)) {
    throw Error(ErrorCode::IdentityViolation, "pi is not stationary for the adjoint",
                std::nullopt, std::nullopt, residual);
  }
  return result;
}

WeightedFn apply_adjoint_density(const MarkovChain& chain, const Dist& pi, const Dist& mu) {
  if (mu.size() != chain.n()) throw Error(ErrorCode::SizeMismatch, "mu and chain sizes differ");
  const MarkovChain star = adjoint(chain, pi);
  const Vector f = density_ratio(mu, pi) - Vector::Ones(static_cast<Eigen::Index>(pi.size()));

  const double mean = pi.values().dot(f);
  if (std::abs(mean) > 2.0 * kDistTolerance + 1e-12) {
    throw Error(ErrorCode::IdentityViolation, "E_pi[mu/pi - 1] is not zero", std::nullopt,
                std::nullopt, mean);
  }

  Vector result = star.apply(f);
  const Vector direct =
      chain.left_multiply(mu.values()).cwiseQuotient(pi.values()) -
      Vector::Ones(f.size());
  const double scale = std::max(1.0, direct.cwiseAbs().maxCoeff());
  const double gap = (result - direct).cwiseAbs().maxCoeff();
  if (gap > 1e-10 * scale) {
    throw Error(ErrorCode::IdentityViolation, "P* f differs from mu P / pi - 1", std::nullopt,
                std::nullopt, gap);
  }
  return WeightedFn(std::move(result));
}

}  // namespace sentinel
