#pragma once

#include <array>

#include "polyrom/dof_map.hpp"

namespace polyrom {

// Affine map of triangle t: (xi, eta) -> v0 + xi*(v1-v0) + eta*(v2-v0).
struct TriGeom {
  double x0, y0;
  double j00, j01, j10, j11;  // Jacobian columns (v1-v0, v2-v0)
  double i00, i01, i10, i11;  // inverse-transpose, maps reference gradients
  double area;

  std::array<double, 2> map(double xi, double eta) const {
    return {x0 + j00 * xi + j01 * eta, y0 + j10 * xi + j11 * eta};
  }
  std::array<double, 2> grad(const std::array<double, 2>& ref_grad) const {
    return {i00 * ref_grad[0] + i01 * ref_grad[1],
            i10 * ref_grad[0] + i11 * ref_grad[1]};
  }
};

inline TriGeom tri_geometry(const Mesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  const auto& a = mesh.vertices[tri[0]];
  const auto& b = mesh.vertices[tri[1]];
  const auto& c = mesh.vertices[tri[2]];
  TriGeom g;
  g.x0 = a[0];
  g.y0 = a[1];
  g.j00 = b[0] - a[0];
  g.j01 = c[0] - a[0];
  g.j10 = b[1] - a[1];
  g.j11 = c[1] - a[1];
  const double det = g.j00 * g.j11 - g.j01 * g.j10;
  g.area = 0.5 * det;
  // inverse transpose of J
  g.i00 = g.j11 / det;
  g.i01 = -g.j10 / det;
  g.i10 = -g.j01 / det;
  g.i11 = g.j00 / det;
  return g;
}

// Quadratic Lagrange basis on the reference triangle; local nodes are the
// three vertices followed by the midpoints of edges (01, 12, 20).
inline void p2_shape(double x, double y, std::array<double, 6>& N) {
  const double l1 = 1.0 - x - y, l2 = x, l3 = y;
  N[0] = l1 * (2 * l1 - 1);
  N[1] = l2 * (2 * l2 - 1);
  N[2] = l3 * (2 * l3 - 1);
  N[3] = 4 * l1 * l2;
  N[4] = 4 * l2 * l3;
  N[5] = 4 * l3 * l1;
}

inline void p2_shape_grad_ref(double x, double y,
                              std::array<std::array<double, 2>, 6>& dN) {
  const double l1 = 1.0 - x - y, l2 = x, l3 = y;
  dN[0] = {1 - 4 * l1, 1 - 4 * l1};
  dN[1] = {4 * l2 - 1, 0.0};
  dN[2] = {0.0, 4 * l3 - 1};
  dN[3] = {4 * (l1 - l2), -4 * l2};
  dN[4] = {4 * l3, 4 * l2};
  dN[5] = {-4 * l3, 4 * (l1 - l3)};
}

inline void p1_shape(double x, double y, std::array<double, 3>& N) {
  N[0] = 1.0 - x - y;
  N[1] = x;
  N[2] = y;
}

inline std::array<int, 6> element_scalar_dofs(const DofMap& dm, int t) {
  const auto& tri = dm.mesh->triangles[t];
  const auto& te = dm.tri_edges[t];
  return {tri[0],
          tri[1],
          tri[2],
          dm.n_vertices + te[0],
          dm.n_vertices + te[1],
          dm.n_vertices + te[2]};
}

inline std::array<int, 3> element_pressure_dofs(const DofMap& dm, int t) {
  const auto& tri = dm.mesh->triangles[t];
  return {tri[0], tri[1], tri[2]};
}

}  // namespace polyrom
