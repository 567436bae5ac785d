#pragma once

// Reference computations for the tests. Everything here works on plain
// column-major Eigen matrices and avoids the library's solvers.

#include "sentinel/chain.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline Mat dense(const sentinel::MarkovChain& chain) {
  const auto n = static_cast<Eigen::Index>(chain.n());
  Mat m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      m(i, j) = chain.entry(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
  }
  return m;
}

// Random row-stochastic matrix with strictly positive entries.
inline Mat random_stochastic(int n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Mat m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = u(gen);
    m.row(i) /= m.row(i).sum();
  }
  return m;
}

// Sparse-ish variant: about half the off-diagonal entries zeroed, diagonal
// kept positive so the chain stays aperiodic; a cycle keeps it irreducible.
inline Mat random_sparse_stochastic(int n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Mat m = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = 0.1 + u(gen);
    m(i, (i + 1) % n) = 0.1 + u(gen);
    for (int j = 0; j < n; ++j) {
      if (u(gen) < 0.5) m(i, j) += u(gen);
    }
    m.row(i) /= m.row(i).sum();
  }
  return m;
}

inline Vec random_dist(int n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::exponential_distribution<double> e(1.0);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = e(gen);
  return v / v.sum();
}

// Left Perron vector from the eigendecomposition of P^T.
inline Vec stationary(const Mat& p) {
  Eigen::EigenSolver<Mat> es(p.transpose());
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < es.eigenvalues().size(); ++k) {
    if (std::abs(es.eigenvalues()(k) - 1.0) < std::abs(es.eigenvalues()(best) - 1.0)) best = k;
  }
  Vec v = es.eigenvectors().col(best).real();
  return v / v.sum();
}

// 1 - sup ||Pf||_{2,pi} / ||f||_{2,pi} over E_pi f = 0, as a generalized
// symmetric eigenproblem on the basis f_i = e_i - (pi_i / pi_last) e_last.
inline double spectral_gap(const Mat& p, const Vec& pi) {
  const Eigen::Index n = p.rows();
  Mat basis = Mat::Zero(n, n - 1);
  for (Eigen::Index i = 0; i < n - 1; ++i) {
    basis(i, i) = 1.0;
    basis(n - 1, i) = -pi(i) / pi(n - 1);
  }
  const Mat d = pi.asDiagonal();
  const Mat pb = p * basis;
  const Mat a = pb.transpose() * d * pb;
  const Mat b = basis.transpose() * d * basis;
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(a, b);
  return 1.0 - std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

inline double weighted_norm(const Vec& f, const Vec& pi, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      if (pi(i) > 0.0) m = std::max(m, std::abs(f(i)));
    }
    return m;
  }
  double s = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) s += pi(i) * std::pow(std::abs(f(i)), p);
  return std::pow(s, 1.0 / p);
}

// Ratio ||Pf||_{2,pi} / ||f||_{2,pi} after centering f. Directions that are
// numerically constant score 0, since centering them leaves only roundoff.
inline double rayleigh(const Mat& p, const Vec& pi, Vec f) {
  const double scale = weighted_norm(f, pi, 2.0);
  f.array() -= pi.dot(f);
  const double den = weighted_norm(f, pi, 2.0);
  return den > 1e-8 * scale ? weighted_norm(p * f, pi, 2.0) / den : 0.0;
}

inline Vec centered_unit(const Vec& pi, Vec f) {
  f.array() -= pi.dot(f);
  return f / weighted_norm(f, pi, 2.0);
}

// Brute-force lower bound on the sup: random mean-zero directions followed
// by coordinate-wise hill climbing with a shrinking step, within `budget`
// ratio evaluations.
inline double brute_force_sup(const Mat& p, const Vec& pi, int budget, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  const Eigen::Index n = p.rows();
  const int restarts = budget / 5;
  Vec best(n);
  double best_val = -1.0;
  for (int k = 0; k < restarts; ++k) {
    Vec f(n);
    for (Eigen::Index i = 0; i < n; ++i) f(i) = g(gen);
    const double v = rayleigh(p, pi, f);
    if (v > best_val) {
      best_val = v;
      best = centered_unit(pi, f);
    }
  }
  int used = restarts;
  double step = 0.5;
  while (used < budget) {
    bool improved = false;
    for (Eigen::Index i = 0; i < n && used < budget; ++i) {
      for (const double sign : {1.0, -1.0}) {
        if (used >= budget) break;
        Vec f = best;
        f(i) += sign * step;
        const double v = rayleigh(p, pi, f);
        ++used;
        if (v > best_val) {
          best_val = v;
          best = centered_unit(pi, f);
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return best_val;
}

inline double l1(const Vec& a, const Vec& b) { return (a - b).lpNorm<1>(); }

}  // namespace oracle
