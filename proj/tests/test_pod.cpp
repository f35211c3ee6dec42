#include <cmath>

#include "doctest.h"
#include "polyrom/errors.hpp"
#include "polyrom/pod.hpp"
#include "support.hpp"

using namespace polyrom;

namespace {

// Dense reference: with G = L L^T the G-weighted POD modes are L^{-T} U for
// the thin SVD of L^T S, and the correlation eigenvalues are the squared
// singular values.
struct SvdOracle {
  Eigen::MatrixXd modes;
  Eigen::VectorXd sigma2;
};

SvdOracle weighted_svd(const Eigen::MatrixXd& S, const Eigen::MatrixXd& G) {
  const Eigen::LLT<Eigen::MatrixXd> llt(G);
  const Eigen::MatrixXd L = llt.matrixL();
  const Eigen::MatrixXd B = L.transpose() * S;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeThinU);
  SvdOracle o;
  o.modes = Eigen::MatrixXd(L.transpose())
                .triangularView<Eigen::Upper>()
                .solve(svd.matrixU());
  o.sigma2 = svd.singularValues().array().square();
  return o;
}

double sign_insensitive_dist(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::min((a - b).norm(), (a + b).norm());
}

}  // namespace

TEST_CASE("method of snapshots equals the dense weighted svd") {
  const int d = 40, N = 12;
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const Eigen::MatrixXd S = testsup::random_matrix(d, N, seed);
    const Eigen::MatrixXd Gd = testsup::random_spd(d, seed + 100);
    const SparseMat G = testsup::to_sparse(Gd);

    const PodBasis basis = pod(S, G, N);
    const SvdOracle oracle = weighted_svd(S, Gd);

    REQUIRE(basis.modes.cols() == N);
    REQUIRE(basis.eigenvalues.size() == N);
    for (int k = 0; k < N; ++k) {
      CHECK(sign_insensitive_dist(basis.modes.col(k), oracle.modes.col(k)) <=
            1e-10 * oracle.modes.col(k).norm());
      CHECK(basis.eigenvalues[k] ==
            doctest::Approx(oracle.sigma2[k]).epsilon(1e-10));
    }
  }
}

TEST_CASE("modes are G-orthonormal") {
  const Eigen::MatrixXd S = testsup::random_matrix(25, 8, 5);
  const SparseMat G = testsup::to_sparse(testsup::random_spd(25, 6));
  const PodBasis basis = pod(S, G, 8);
  const Eigen::MatrixXd gram =
      basis.modes.transpose() * G * basis.modes;
  CHECK((gram - Eigen::MatrixXd::Identity(8, 8)).norm() <= 1e-10);
}

TEST_CASE("projection errors satisfy the energy identity") {
  const int d = 30, N = 10, n = 4;
  const Eigen::MatrixXd S = testsup::random_matrix(d, N, 21);
  const SparseMat G = testsup::to_sparse(testsup::random_spd(d, 22));
  const PodBasis basis = pod(S, G, n);
  const ProjectionErrors errs = projection_errors(S, basis, G);

  const double sum_sq = errs.per_column.squaredNorm();
  double tail = 0;
  for (int k = n; k < N; ++k) tail += basis.eigenvalues[k];
  CHECK(sum_sq == doctest::Approx(tail).epsilon(1e-10));
  CHECK(errs.max == doctest::Approx(errs.per_column.maxCoeff()));
}

TEST_CASE("the full basis reproduces every snapshot") {
  const Eigen::MatrixXd S = testsup::random_matrix(20, 6, 31);
  const SparseMat G = testsup::to_sparse(testsup::random_spd(20, 32));
  const PodBasis basis = pod(S, G, 6);
  const ProjectionErrors errs = projection_errors(S, basis, G);
  const double scale = std::sqrt(basis.eigenvalues[0]);
  CHECK(errs.max <= 1e-12 * scale);
}

TEST_CASE("rank-deficient snapshot sets drop the null modes") {
  Eigen::MatrixXd S = testsup::random_matrix(15, 3, 41);
  S.col(2) = S.col(0);  // rank 2
  const SparseMat G = testsup::to_sparse(testsup::random_spd(15, 42));
  const PodBasis basis = pod(S, G, 3);
  CHECK(basis.modes.cols() == 2);
  CHECK(basis.eigenvalues.size() == 3);
  CHECK(basis.eigenvalues[2] <= basis.eigenvalues[0] * 1e-12);
  // the rank-2 basis still reproduces all three columns
  const ProjectionErrors errs = projection_errors(S, basis, G);
  CHECK(errs.max <= 1e-10 * std::sqrt(basis.eigenvalues[0]));
}

TEST_CASE("pod argument validation") {
  const Eigen::MatrixXd S = testsup::random_matrix(10, 4, 51);
  const SparseMat G = testsup::to_sparse(testsup::random_spd(10, 52));
  CHECK_THROWS_AS(pod(S, G, 0), ConfigError);
  CHECK_THROWS_AS(pod(S, G, 5), ConfigError);
  CHECK_THROWS_AS(pod(Eigen::MatrixXd(10, 0), G, 1), NumericalError);
  CHECK_THROWS_AS(pod(Eigen::MatrixXd::Zero(10, 4), G, 1), NumericalError);
}

TEST_CASE("knw curve is nonincreasing and bottoms out at machine level") {
  const int du = 30, dp = 18, N = 10;
  SnapshotSet set;
  set.Mu = testsup::random_matrix(du, N, 61);
  set.Mp = testsup::random_matrix(dp, N, 62);
  set.Gu = testsup::to_sparse(testsup::random_spd(du, 63));
  set.Gp = testsup::to_sparse(testsup::random_spd(dp, 64));

  // unsorted, with duplicates: the curve must come back sorted and unique
  const std::vector<int> n_values{4, 1, 7, 4, 10, 2};
  const auto curve = knw_curve(set, n_values);
  REQUIRE(curve.size() == 5);
  CHECK(curve.front().n == 1);
  CHECK(curve.back().n == 10);
  for (std::size_t i = 1; i < curve.size(); ++i) {
    CHECK(curve[i].n > curve[i - 1].n);
    CHECK(curve[i].eps_u <= curve[i - 1].eps_u);
    CHECK(curve[i].eps_p <= curve[i - 1].eps_p);
  }
  CHECK(curve.back().eps_u <= 1e-8 * curve.front().eps_u);
  CHECK(curve.back().eps_p <= 1e-8 * curve.front().eps_p);

  CHECK_THROWS_AS(knw_curve(set, {0}), ConfigError);
  CHECK_THROWS_AS(knw_curve(set, {11}), ConfigError);
}

TEST_CASE("knw curve matches one-shot projection errors at each n") {
  const int du = 24, N = 8;
  SnapshotSet set;
  set.Mu = testsup::random_matrix(du, N, 71);
  set.Mp = testsup::random_matrix(12, N, 72);
  set.Gu = testsup::to_sparse(testsup::random_spd(du, 73));
  set.Gp = testsup::to_sparse(testsup::random_spd(12, 74));
  std::vector<int> ns;
  for (int n = 1; n <= N; ++n) ns.push_back(n);
  const auto curve = knw_curve(set, ns);
  for (const auto& pt : curve) {
    if (pt.n == N) continue;  // both sides are machine zero there
    const PodBasis bu = pod(set.Mu, set.Gu, pt.n);
    const double direct = projection_errors(set.Mu, bu, set.Gu).max;
    CHECK(pt.eps_u == doctest::Approx(direct).epsilon(1e-8));
  }
  CHECK(curve.back().eps_u <= 1e-10 * curve.front().eps_u);
}

TEST_CASE("euclidean-basis knw curve still reports gram-norm errors") {
  const int du = 22, dp = 14, N = 7;
  SnapshotSet set;
  set.Mu = testsup::random_matrix(du, N, 81);
  set.Mp = testsup::random_matrix(dp, N, 82);
  const Eigen::MatrixXd Gud = testsup::random_spd(du, 83);
  const Eigen::MatrixXd Gpd = testsup::random_spd(dp, 84);
  set.Gu = testsup::to_sparse(Gud);
  set.Gp = testsup::to_sparse(Gpd);
  std::vector<int> ns;
  for (int n = 1; n <= N; ++n) ns.push_back(n);
  const auto curve = knw_curve(set, ns, true);

  // Dense oracle: G-orthogonal projector onto the span of the plain
  // (identity-weighted) POD modes, error measured in the G norm.
  auto oracle = [](const Eigen::MatrixXd& S, const Eigen::MatrixXd& Gd,
                   int n) {
    SparseMat ident(S.rows(), S.rows());
    ident.setIdentity();
    const Eigen::MatrixXd V = pod(S, ident, n).modes;
    const Eigen::MatrixXd P =
        V * (V.transpose() * Gd * V).ldlt().solve(V.transpose() * Gd);
    double worst = 0;
    for (int j = 0; j < S.cols(); ++j) {
      const Eigen::VectorXd r = S.col(j) - P * S.col(j);
      worst = std::max(worst, std::sqrt(r.dot(Gd * r)));
    }
    return worst;
  };

  for (std::size_t i = 0; i < curve.size(); ++i) {
    const auto& pt = curve[i];
    if (pt.n < N) {
      CHECK(pt.eps_u ==
            doctest::Approx(oracle(set.Mu, Gud, pt.n)).epsilon(1e-10));
      CHECK(pt.eps_p ==
            doctest::Approx(oracle(set.Mp, Gpd, pt.n)).epsilon(1e-10));
    }
    if (i > 0) {
      CHECK(pt.eps_u <= curve[i - 1].eps_u);
      CHECK(pt.eps_p <= curve[i - 1].eps_p);
    }
  }
  CHECK(curve.back().eps_u <= 1e-8 * curve.front().eps_u);
  CHECK(curve.back().eps_p <= 1e-8 * curve.front().eps_p);
}
