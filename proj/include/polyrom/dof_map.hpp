#pragma once

#include <array>
#include <vector>

#include "polyrom/mesh.hpp"

namespace polyrom {

enum class VelConstraint : unsigned char { Free, DirichletZero, SlipNormalZero };

// Free-dof bookkeeping for one function space. apply_constraints keeps only
// `keep`; scatter_free is the zero-extension back to the full space.
struct Constraints {
  int full_size = 0;
  std::vector<int> keep;             // ascending free dof ids
  std::vector<int> full_to_reduced;  // -1 where constrained
  int reduced_size() const { return static_cast<int>(keep.size()); }
};

// Taylor-Hood P2-P1 layouts on a triangulation.
//   scalar P2 dof k: vertex k for k < n_vertices, else midpoint of edge
//                    k - n_vertices
//   velocity dof:    2*k + c for scalar node k, component c
//   pressure P1 dof: vertex index
struct DofMap {
  const Mesh* mesh = nullptr;
  BoundarySpec bcs;

  int n_vertices = 0, n_edges = 0;
  int n_scalar = 0, n_velocity = 0, n_pressure = 0;

  std::vector<std::array<int, 2>> edge_verts;  // edge id -> (lo, hi) vertices
  std::vector<std::array<int, 3>> tri_edges;   // local edges (01, 12, 20)

  std::vector<VelConstraint> vel_constraint;    // per velocity dof
  std::vector<unsigned char> scalar_boundary;   // scalar node on boundary?
  bool mean_zero_pressure = false;              // all tags Dirichlet

  Constraints velocity;          // free velocity dofs under bcs
  Constraints scalar_dirichlet;  // P2 scalar, zero trace on whole boundary

  std::array<double, 2> scalar_node_coord(int k) const;
};

DofMap build_dofmap(const Mesh& mesh, const BoundarySpec& bcs);

}  // namespace polyrom
