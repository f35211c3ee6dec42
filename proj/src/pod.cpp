#include "polyrom/pod.hpp"

#include <algorithm>
#include <cmath>

#include "polyrom/errors.hpp"
#include "polyrom/parallel.hpp"

namespace polyrom {

namespace {

// Correlation spectrum of S in the G inner product, eigenvalues descending
// with matching snapshot-space eigenvectors.
void correlation_eig(const Eigen::MatrixXd& S, const SparseMat& G,
                     Eigen::VectorXd& lambda, Eigen::MatrixXd& V) {
  const int N = static_cast<int>(S.cols());
  Eigen::MatrixXd GS(S.rows(), N);
  parallel_for(0, static_cast<std::size_t>(N),
               [&](std::size_t j) { GS.col(j) = G * S.col(j); });
  Eigen::MatrixXd C = S.transpose() * GS;
  C = 0.5 * (C + C.transpose()).eval();  // enforce exact symmetry
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
  if (es.info() != Eigen::Success)
    throw NumericalError("pod: correlation eigendecomposition failed");
  lambda.resize(N);
  V.resize(N, N);
  // Eigen returns ascending; flip to descending.
  for (int k = 0; k < N; ++k) {
    lambda[k] = es.eigenvalues()[N - 1 - k];
    V.col(k) = es.eigenvectors().col(N - 1 - k);
  }
}

// Modified Gram-Schmidt in the G inner product, two passes. Lifted modes near
// the rank cutoff lose orthogonality through the 1/sqrt(lambda) scaling; this
// restores it without changing any leading span.
void g_orthonormalize(Eigen::MatrixXd& Q, const SparseMat& G) {
  for (int k = 0; k < Q.cols(); ++k) {
    for (int pass = 0; pass < 2; ++pass) {
      const Vec Gq = G * Q.col(k);
      for (int i = 0; i < k; ++i)
        Q.col(k) -= Q.col(i).dot(Gq) * Q.col(i);
    }
    const double nrm = std::sqrt(Q.col(k).dot(G * Q.col(k)));
    Q.col(k) /= nrm;
  }
}

}  // namespace

PodBasis pod(const Eigen::MatrixXd& S, const SparseMat& G, int n) {
  const int N = static_cast<int>(S.cols());
  if (N == 0) throw NumericalError("pod: empty snapshot set");
  if (n < 1 || n > N)
    throw ConfigError("pod: n must lie in [1, " + std::to_string(N) + "]");

  Eigen::VectorXd lambda;
  Eigen::MatrixXd V;
  correlation_eig(S, G, lambda, V);

  if (!(lambda[0] > 0)) throw NumericalError("pod: degenerate snapshots");
  const double cutoff = lambda[0] * 1e-14;
  int usable = 0;
  while (usable < n && lambda[usable] > cutoff) ++usable;
  if (usable == 0) throw NumericalError("pod: degenerate snapshots");

  PodBasis basis;
  basis.eigenvalues = lambda;
  basis.modes.resize(S.rows(), usable);
  for (int k = 0; k < usable; ++k)
    basis.modes.col(k) = S * V.col(k) / std::sqrt(lambda[k]);
  g_orthonormalize(basis.modes, G);
  return basis;
}

ProjectionErrors projection_errors(const Eigen::MatrixXd& S,
                                   const PodBasis& basis, const SparseMat& G) {
  if (basis.modes.cols() > 0 && basis.modes.rows() != S.rows())
    throw ConfigError("projection_errors: basis/snapshot dimension mismatch");
  const int N = static_cast<int>(S.cols());
  ProjectionErrors out;
  out.per_column.resize(N);
  // Norm of the explicit residual s - sum c_k q_k; unlike the Pythagorean
  // form s^T G s - sum c^2 this keeps full precision once the basis spans
  // the column (the self-convergence plateau).
  parallel_for(0, static_cast<std::size_t>(N), [&](std::size_t j) {
    const Vec Gs = G * S.col(j);
    Vec r = S.col(j);
    for (int k = 0; k < basis.modes.cols(); ++k)
      r -= basis.modes.col(k).dot(Gs) * basis.modes.col(k);
    const double sq = r.dot(G * r);
    out.per_column[j] = sq > 0 ? std::sqrt(sq) : 0.0;
  });
  out.max = N > 0 ? out.per_column.maxCoeff() : 0.0;
  return out;
}

std::vector<KnwPoint> knw_curve(const SnapshotSet& set,
                                const std::vector<int>& n_values,
                                bool euclidean_basis) {
  const int N = static_cast<int>(set.Mu.cols());
  if (N == 0) throw NumericalError("knw_curve: empty snapshot set");
  for (int n : n_values)
    if (n < 1 || n > N)
      throw ConfigError("knw_curve: n = " + std::to_string(n) +
                        " outside [1, " + std::to_string(N) + "]");

  std::vector<int> ns = n_values;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

  // One basis per field (all usable modes); prefixes give every n. Errors per
  // column are computed from incremental residuals and kept monotone with a
  // running min, which stays a valid upper bound (a larger subspace can only
  // approximate better).
  struct Curve {
    std::vector<double> eps;  // indexed like ns
  };
  auto field_curve = [&](const Eigen::MatrixXd& S, const SparseMat& G) {
    const PodBasis basis = pod(S, G, N);
    const int usable = static_cast<int>(basis.modes.cols());
    Eigen::MatrixXd R = S;                       // residuals per column
    Eigen::MatrixXd coef(usable, N);             // (mode, column)
    for (int j = 0; j < N; ++j) {
      const Vec Gs = G * S.col(j);
      for (int k = 0; k < usable; ++k) coef(k, j) = basis.modes.col(k).dot(Gs);
    }
    Curve c;
    c.eps.resize(ns.size());
    Eigen::VectorXd best = Eigen::VectorXd::Constant(N, -1.0);
    int done = 0;
    for (std::size_t idx = 0; idx < ns.size(); ++idx) {
      const int upto = std::min(ns[idx], usable);
      for (; done < upto; ++done)
        for (int j = 0; j < N; ++j)
          R.col(j) -= coef(done, j) * basis.modes.col(done);
      double worst = 0.0;
      for (int j = 0; j < N; ++j) {
        const double sq = R.col(j).dot(G * R.col(j));
        double e = sq > 0 ? std::sqrt(sq) : 0.0;
        if (best[j] < 0 || e < best[j]) best[j] = e;
        worst = std::max(worst, best[j]);
      }
      c.eps[idx] = worst;
    }
    return c;
  };

  // Comparison variant: span chosen by a plain-Euclidean POD, error still the
  // G-distance to that span. The modes are not G-orthonormal, so the
  // projection coefficients come from the small Gram system V^T G V.
  auto field_curve_euclid = [&](const Eigen::MatrixXd& S, const SparseMat& G) {
    SparseMat ident(S.rows(), S.rows());
    ident.setIdentity();
    const PodBasis basis = pod(S, ident, N);
    const int usable = static_cast<int>(basis.modes.cols());
    Eigen::MatrixXd GV(S.rows(), usable);
    for (int k = 0; k < usable; ++k) GV.col(k) = G * basis.modes.col(k);
    const Eigen::MatrixXd T = basis.modes.transpose() * GV;
    const Eigen::MatrixXd W = GV.transpose() * S;
    Curve c;
    c.eps.resize(ns.size());
    Eigen::VectorXd best = Eigen::VectorXd::Constant(N, -1.0);
    for (std::size_t idx = 0; idx < ns.size(); ++idx) {
      const int upto = std::min(ns[idx], usable);
      const Eigen::MatrixXd coef =
          T.topLeftCorner(upto, upto).llt().solve(W.topRows(upto));
      const Eigen::MatrixXd R = S - basis.modes.leftCols(upto) * coef;
      double worst = 0.0;
      for (int j = 0; j < N; ++j) {
        const double sq = R.col(j).dot(G * R.col(j));
        double e = sq > 0 ? std::sqrt(sq) : 0.0;
        if (best[j] < 0 || e < best[j]) best[j] = e;
        worst = std::max(worst, best[j]);
      }
      c.eps[idx] = worst;
    }
    return c;
  };

  const Curve cu = euclidean_basis ? field_curve_euclid(set.Mu, set.Gu)
                                   : field_curve(set.Mu, set.Gu);
  const Curve cp = euclidean_basis ? field_curve_euclid(set.Mp, set.Gp)
                                   : field_curve(set.Mp, set.Gp);

  std::vector<KnwPoint> out;
  out.reserve(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i)
    out.push_back({ns[i], cu.eps[i], cp.eps[i]});
  return out;
}

}  // namespace polyrom
