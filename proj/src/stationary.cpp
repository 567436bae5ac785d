#include "sentinel/stationary.hpp"

#include "sentinel/errors.hpp"
#include "sentinel/geometry.hpp"

#include <Eigen/SVD>
#include <Eigen/SparseLU>

#include <cmath>
#include <string>

namespace sentinel {

namespace {

// Singular values of P - I at or below this (relative to ||P||) count
// towards the nullity.
constexpr double kRankThreshold = 1e-8;

Dist finish(const MarkovChain& chain, Vector values, double tol) {
  Dist pi = Dist::from_numeric(std::move(values));
  const double residual = stationarity_residual(chain, pi);
  if (!(residual <= tol)) {
    throw Error(ErrorCode::SolveFailure,
                "stationary residual " + std::to_string(residual) + " exceeds tolerance",
                std::nullopt, std::nullopt, residual);
  }
  return pi;
}

Dist direct_dense(const MarkovChain& chain, double tol) {
  const DenseMatrix p = chain.to_dense();
  const auto n = p.rows();
  Eigen::MatrixXd a = p.transpose();
  a.diagonal().array() -= 1.0;

  // ||P||_2 <= sqrt(||P||_1 ||P||_inf) and ||P||_inf = 1.
  const double norm = std::sqrt(p.colwise().sum().maxCoeff());
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  const Vector& sv = svd.singularValues();
  Eigen::Index nullity = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] <= kRankThreshold * norm) ++nullity;
  }
  if (nullity > 1) {
    throw Error(ErrorCode::NonUniqueStationary,
                "P - I has nullity " + std::to_string(nullity) + " at tolerance",
                static_cast<std::size_t>(nullity));
  }

  // Every balance equation is implied by the others; swap the last one for
  // the normalization sum(pi) = 1.
  a.row(n - 1).setOnes();
  Vector rhs = Vector::Zero(n);
  rhs[n - 1] = 1.0;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  Vector x = lu.solve(rhs);
  if (!x.allFinite()) throw Error(ErrorCode::SingularSystem, "balance system is singular");
  return finish(chain, std::move(x), tol);
}

Dist direct_sparse(const MarkovChain& chain, double tol) {
  const auto n = static_cast<Eigen::Index>(chain.n());
  std::vector<Eigen::Triplet<double>> entries;
  for (const auto& t : chain.triplets()) {
    if (static_cast<Eigen::Index>(t.col) == n - 1) continue;
    entries.emplace_back(static_cast<int>(t.col), static_cast<int>(t.row), t.prob);
  }
  for (Eigen::Index i = 0; i < n - 1; ++i) entries.emplace_back(i, i, -1.0);
  for (Eigen::Index j = 0; j < n; ++j) entries.emplace_back(n - 1, j, 1.0);
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(entries.begin(), entries.end());
  a.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularSystem, "sparse balance system is singular");
  }
  Vector rhs = Vector::Zero(n);
  rhs[n - 1] = 1.0;
  Vector x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) {
    throw Error(ErrorCode::SingularSystem, "sparse balance solve failed");
  }
  return finish(chain, std::move(x), tol);
}

Dist power(const MarkovChain& chain, double tol, std::size_t max_iter) {
  Vector nu = Dist::uniform(chain.n()).values();
  double change = 0.0;
  for (std::size_t k = 0; k < max_iter; ++k) {
    Vector next = chain.left_multiply(nu);
    next /= next.sum();
    change = (next - nu).lpNorm<1>();
    nu = std::move(next);
    // ||nu_{k+1} P - nu_{k+1}||_1 <= ||nu_{k+1} - nu_k||_1 since P contracts l1.
    if (change < tol) return Dist::from_numeric(std::move(nu));
  }
  throw Error(ErrorCode::NoConvergence,
              "power iteration hit " + std::to_string(max_iter) + " iterations",
              max_iter, std::nullopt, change);
}

}  // namespace

Vector solve_resolvent(const MarkovChain& chain, double delta, const Vector& mu) {
  if (static_cast<std::size_t>(mu.size()) != chain.n()) {
    throw Error(ErrorCode::SizeMismatch, "restart length differs from state count");
  }
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "resolvent needs damping in (0, 1]", std::nullopt,
                std::nullopt, delta);
  }
  if (chain.is_composite()) {
    // (1 - d) ((1 - w) B + w 1^T nu) + d 1^T mu = (1 - d') B + d' 1^T mu'
    const double w = chain.restart_weight();
    const double folded = 1.0 - (1.0 - delta) * (1.0 - w);
    const Vector restart = (delta * mu + (1.0 - delta) * w * chain.restart_values()) / folded;
    return solve_resolvent(chain.base(), folded, restart);
  }
  if (delta == 1.0) return mu;

  const auto n = static_cast<Eigen::Index>(chain.n());
  const Vector rhs = delta * mu;
  Vector x;
  if (const auto* d = chain.dense_base()) {
    Eigen::MatrixXd a = -(1.0 - delta) * d->transpose();
    a.diagonal().array() += 1.0;
    x = Eigen::PartialPivLU<Eigen::MatrixXd>(a).solve(rhs);
  } else {
    Eigen::SparseMatrix<double> a = -(1.0 - delta) * Eigen::SparseMatrix<double>(
                                                          chain.sparse_base()->transpose());
    SparseMatrix identity(n, n);
    identity.setIdentity();
    a += Eigen::SparseMatrix<double>(identity);
    a.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) {
      throw Error(ErrorCode::SolveFailure, "sparse resolvent factorization failed");
    }
    x = lu.solve(rhs);
  }
  if (!x.allFinite()) throw Error(ErrorCode::SolveFailure, "resolvent solve produced non-finite values");
  return x;
}

Dist stationary(const MarkovChain& chain, StationaryMethod method, double tol,
                std::size_t max_iter) {
  if (!(tol > 0.0)) throw Error(ErrorCode::OutOfRange, "tolerance must be positive");
  if (method == StationaryMethod::Power) return power(chain, tol, max_iter);
  if (chain.is_composite()) {
    return finish(chain, solve_resolvent(chain.base(), chain.restart_weight(),
                                         chain.restart_values()),
                  tol);
  }
  if (chain.n() <= kDenseLimit) return direct_dense(chain, tol);
  return direct_sparse(chain, tol);
}

}  // namespace sentinel
