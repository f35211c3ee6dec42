#include "polyrom/eigensolve.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "polyrom/errors.hpp"

namespace polyrom {

namespace {

// Deterministic sign convention: flip so the largest-|entry| component
// (first index on ties) is positive.
void fix_sign(Vec& v) {
  int best = 0;
  double mag = std::abs(v[0]);
  for (int i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > mag) {
      mag = std::abs(v[i]);
      best = i;
    }
  if (v[best] < 0) v = -v;
}

}  // namespace

std::vector<EigenPair> smallest_generalized_eigpairs(const SparseMat& K,
                                                     const SparseMat& M,
                                                     int n, double tol,
                                                     std::uint64_t seed,
                                                     EigStats* stats) {
  const int dim = static_cast<int>(K.rows());
  if (n < 1 || n > dim)
    throw NumericalError("eigensolve: requested " + std::to_string(n) +
                         " pairs from a " + std::to_string(dim) +
                         "-dim problem");

  Eigen::SimplicialLDLT<SparseMat> Kfac(K);
  if (Kfac.info() != Eigen::Success)
    throw NumericalError("eigensolve: stiffness factorization failed");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // M-orthonormal Lanczos basis; MV caches M*V[i] so reorthogonalization
  // costs plain dots instead of sparse products.
  std::vector<Vec> V, MV;
  std::vector<double> alpha;  // diagonal of the projected operator
  std::vector<double> beta;   // beta[j] couples v_{j-1} and v_j; beta[0]=0

  auto push_vec = [&](Vec v) {
    MV.push_back(M * v);
    V.push_back(std::move(v));
  };

  auto fresh_start = [&]() {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = gauss(rng);
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t i = 0; i < V.size(); ++i) v -= MV[i].dot(v) * V[i];
    const double nrm = std::sqrt(v.dot(M * v));
    if (!(nrm > 0)) throw NumericalError("eigensolve: degenerate start");
    return Vec(v / nrm);
  };

  // One Lanczos expansion from the last basis vector. Returns false when the
  // basis cannot grow (dim reached).
  auto expand = [&]() {
    const std::size_t j = V.size() - 1;
    Vec w = Kfac.solve(MV[j]);
    double a = 0.0;
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t i = 0; i < V.size(); ++i) {
        const double c = MV[i].dot(w);
        if (pass == 0 && i == j) a = c;
        w -= c * V[i];
      }
    alpha.resize(V.size(), 0.0);
    alpha[j] = a;
    if (static_cast<int>(V.size()) >= dim) return false;
    const double b = std::sqrt(std::max(0.0, w.dot(M * w)));
    if (b < 1e-13) {
      // Invariant subspace hit: restart in a fresh orthogonal direction.
      push_vec(fresh_start());
      beta.push_back(0.0);
    } else {
      push_vec(w / b);
      beta.push_back(b);
    }
    return true;
  };

  int m = std::min(dim, std::max(2 * n + 16, 40));
  std::vector<EigenPair> result;
  double worst_res = 0.0;

  push_vec(fresh_start());
  beta.push_back(0.0);

  while (true) {
    while (static_cast<int>(V.size()) < m && expand()) {
    }
    if (alpha.size() < V.size()) expand();  // alpha for the newest vector

    const int k = static_cast<int>(alpha.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta[i + 1];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);

    // Largest mu of K^{-1}M <-> smallest lambda. Check the n best Ritz pairs.
    result.clear();
    worst_res = 0.0;
    bool ok = n <= k;
    for (int j = 0; ok && j < n; ++j) {
      const int idx = k - 1 - j;
      const double mu = es.eigenvalues()[idx];
      if (mu <= 0) {
        ok = false;
        break;
      }
      Vec x = Vec::Zero(dim);
      for (int i = 0; i < k; ++i) x += es.eigenvectors()(i, idx) * V[i];
      const double lambda = 1.0 / mu;
      const Vec Kx = K * x;
      const double res = (Kx - lambda * (M * x)).norm() / Kx.norm();
      worst_res = std::max(worst_res, res);
      if (res > tol) {
        ok = false;
        break;
      }
      x /= std::sqrt(x.dot(M * x));
      fix_sign(x);
      result.push_back({lambda, std::move(x)});
    }
    if (ok && static_cast<int>(result.size()) == n) break;

    if (static_cast<int>(V.size()) >= dim) {
      // Complete subspace and still short: dense fallback, exact at this size.
      Eigen::MatrixXd Kd(K), Md(M);
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(Kd, Md);
      if (ges.info() != Eigen::Success)
        throw NumericalError("eigensolve: dense fallback failed");
      result.clear();
      for (int j = 0; j < n; ++j) {
        Vec x = ges.eigenvectors().col(j);
        x /= std::sqrt(x.dot(M * x));
        fix_sign(x);
        result.push_back({ges.eigenvalues()[j], std::move(x)});
      }
      break;
    }
    m = std::min(dim, 2 * m);
  }

  std::sort(result.begin(), result.end(),
            [](const EigenPair& a, const EigenPair& b) {
              return a.lambda < b.lambda;
            });
  if (stats) {
    stats->subspace_dim = static_cast<int>(V.size());
    stats->worst_residual = worst_res;
  }
  return result;
}

}  // namespace polyrom
