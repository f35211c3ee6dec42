#pragma once

#include <random>

#include "polyrom/assembly.hpp"
#include "polyrom/dof_map.hpp"
#include "polyrom/mesh.hpp"

namespace testsup {

inline polyrom::BoundarySpec all_dirichlet(const polyrom::Mesh& mesh) {
  polyrom::BoundarySpec bcs;
  for (const auto& tag : mesh.segment_tags)
    bcs.kinds[tag] = polyrom::BcKind::Dirichlet;
  return bcs;
}

// Unit square split into two triangles along the main diagonal.
inline polyrom::Mesh two_tri_square() {
  return polyrom::generate_rectangle(0, 0, 1, 1, 1, 1);
}

// Two-triangle square, Dirichlet on bottom/top/left, Neumann on the right:
// four free velocity dofs (both components at the midpoints of the right
// edge and of the diagonal).
struct TinyFixture {
  polyrom::Mesh mesh;
  polyrom::BoundarySpec bcs;
};

inline TinyFixture tiny_fixture() {
  TinyFixture f;
  f.mesh = two_tri_square();
  f.bcs.kinds["bottom"] = polyrom::BcKind::Dirichlet;
  f.bcs.kinds["top"] = polyrom::BcKind::Dirichlet;
  f.bcs.kinds["left"] = polyrom::BcKind::Dirichlet;
  f.bcs.kinds["right"] = polyrom::BcKind::Neumann;
  return f;
}

inline Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = dist(rng);
  return m;
}

// Random symmetric positive definite matrix, eigenvalues in ~[0.5, d+0.5].
inline Eigen::MatrixXd random_spd(int d, std::uint64_t seed) {
  const Eigen::MatrixXd a = random_matrix(d, d, seed);
  return a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(d, d);
}

inline polyrom::SparseMat to_sparse(const Eigen::MatrixXd& a) {
  return a.sparseView();
}

inline polyrom::Vec random_vec(int n, std::uint64_t seed) {
  return random_matrix(n, 1, seed).col(0);
}

}  // namespace testsup
