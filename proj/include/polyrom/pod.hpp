#pragma once

#include <Eigen/Dense>
#include <vector>

#include "polyrom/assembly.hpp"

namespace polyrom {

// Converged flow snapshots, column-wise, with the Gram matrices defining the
// norms the compression is optimal in (H1 for velocity, L2 for pressure).
struct SnapshotSet {
  Eigen::MatrixXd Mu;  // d_u x N, full velocity space coefficients
  Eigen::MatrixXd Mp;  // d_p x N
  SparseMat Gu;        // H1 velocity Gram (full space)
  SparseMat Gp;        // L2 pressure Gram
  std::vector<int> forcing_index;  // per column
  std::vector<int> newton_iters;   // per column
  std::vector<double> residuals;   // per column
  std::vector<int> failed;         // forcing indices of dropped solves
};

struct PodBasis {
  Eigen::MatrixXd modes;     // d x n, G-orthonormal columns
  Eigen::VectorXd eigenvalues;  // all N correlation eigenvalues, descending
};

// Method of snapshots: eigendecompose C = S^T G S and lift the n leading
// eigenvectors. Modes below the rank cutoff lambda_1 * 1e-14 are dropped.
PodBasis pod(const Eigen::MatrixXd& S, const SparseMat& G, int n);

struct ProjectionErrors {
  Eigen::VectorXd per_column;
  double max = 0;
};

// ||s - Pi s||_G per column for the G-orthogonal projector onto the basis.
ProjectionErrors projection_errors(const Eigen::MatrixXd& S,
                                   const PodBasis& basis, const SparseMat& G);

struct KnwPoint {
  int n;
  double eps_u;
  double eps_p;
};

// Projection-error bounds for every n in n_values, velocity and pressure.
// One eigendecomposition per field; the bases are nested, so the curves are
// nonincreasing by construction. With euclidean_basis the spanning basis is
// computed in the plain Euclidean inner product instead (comparison variant);
// the reported errors are still the Gram-norm distances to the span.
std::vector<KnwPoint> knw_curve(const SnapshotSet& set,
                                const std::vector<int>& n_values,
                                bool euclidean_basis = false);

}  // namespace polyrom
