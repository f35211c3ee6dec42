#include "polyrom/dof_map.hpp"

#include <algorithm>
#include <cmath>

#include "polyrom/errors.hpp"

namespace polyrom {

std::array<double, 2> DofMap::scalar_node_coord(int k) const {
  if (k < n_vertices) return mesh->vertices[k];
  const auto& e = edge_verts[k - n_vertices];
  const auto& a = mesh->vertices[e[0]];
  const auto& b = mesh->vertices[e[1]];
  return {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
}

namespace {

Constraints make_constraints(int full_size,
                             const std::vector<unsigned char>& constrained) {
  Constraints c;
  c.full_size = full_size;
  c.full_to_reduced.assign(full_size, -1);
  for (int i = 0; i < full_size; ++i) {
    if (!constrained[i]) {
      c.full_to_reduced[i] = static_cast<int>(c.keep.size());
      c.keep.push_back(i);
    }
  }
  return c;
}

}  // namespace

DofMap build_dofmap(const Mesh& mesh, const BoundarySpec& bcs) {
  if (!bcs.covers(mesh))
    throw ConfigError("boundary spec does not cover all mesh tags");
  bool has_dirichlet = false;
  for (const auto& [tag, kind] : bcs.kinds)
    if (kind == BcKind::Dirichlet && mesh.tag_id(tag) >= 0)
      has_dirichlet = true;
  if (!has_dirichlet)
    throw ConfigError("at least one boundary tag must be Dirichlet");

  DofMap dm;
  dm.mesh = &mesh;
  dm.bcs = bcs;
  dm.n_vertices = static_cast<int>(mesh.vertices.size());

  // edge table, sorted lexicographically for a deterministic layout
  std::vector<std::array<int, 2>> edges;
  edges.reserve(mesh.triangles.size() * 3);
  for (const auto& tri : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      int a = tri[k], b = tri[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      edges.push_back({a, b});
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  dm.edge_verts = std::move(edges);
  dm.n_edges = static_cast<int>(dm.edge_verts.size());

  auto edge_id = [&](int a, int b) {
    if (a > b) std::swap(a, b);
    const std::array<int, 2> key{a, b};
    auto it = std::lower_bound(dm.edge_verts.begin(), dm.edge_verts.end(), key);
    return static_cast<int>(it - dm.edge_verts.begin());
  };
  dm.tri_edges.reserve(mesh.triangles.size());
  for (const auto& tri : mesh.triangles)
    dm.tri_edges.push_back({edge_id(tri[0], tri[1]), edge_id(tri[1], tri[2]),
                            edge_id(tri[2], tri[0])});

  dm.n_scalar = dm.n_vertices + dm.n_edges;
  dm.n_velocity = 2 * dm.n_scalar;
  dm.n_pressure = dm.n_vertices;

  // classify the P2 nodes touched by each tagged boundary edge
  dm.scalar_boundary.assign(dm.n_scalar, 0);
  std::vector<unsigned char> dirichlet(dm.n_scalar, 0);
  std::vector<unsigned char> slip_x(dm.n_scalar, 0), slip_y(dm.n_scalar, 0);
  for (const auto& be : mesh.boundary_edges) {
    const BcKind kind = bcs.kind_of(mesh.tag_name(be.tag));
    const int nodes[3] = {be.v0, be.v1, dm.n_vertices + edge_id(be.v0, be.v1)};
    for (int n : nodes) dm.scalar_boundary[n] = 1;
    if (kind == BcKind::Neumann) continue;
    if (kind == BcKind::Dirichlet) {
      for (int n : nodes) dirichlet[n] = 1;
      continue;
    }
    // slip: constrain the component normal to the axis-aligned edge
    const auto& a = mesh.vertices[be.v0];
    const auto& b = mesh.vertices[be.v1];
    const double dx = std::abs(b[0] - a[0]), dy = std::abs(b[1] - a[1]);
    if (dy <= 1e-12 * std::max(1.0, dx)) {
      for (int n : nodes) slip_y[n] = 1;  // horizontal edge, normal = e_y
    } else if (dx <= 1e-12 * std::max(1.0, dy)) {
      for (int n : nodes) slip_x[n] = 1;  // vertical edge, normal = e_x
    } else {
      throw ConfigError("slip boundary on non-axis-aligned edge (tag '" +
                        mesh.tag_name(be.tag) + "')");
    }
  }

  dm.vel_constraint.assign(dm.n_velocity, VelConstraint::Free);
  std::vector<unsigned char> vel_constrained(dm.n_velocity, 0);
  std::vector<unsigned char> scalar_constrained(dm.n_scalar, 0);
  for (int k = 0; k < dm.n_scalar; ++k) {
    if (dirichlet[k]) {  // Dirichlet wins over slip at junction nodes
      dm.vel_constraint[2 * k] = VelConstraint::DirichletZero;
      dm.vel_constraint[2 * k + 1] = VelConstraint::DirichletZero;
    } else {
      if (slip_x[k]) dm.vel_constraint[2 * k] = VelConstraint::SlipNormalZero;
      if (slip_y[k])
        dm.vel_constraint[2 * k + 1] = VelConstraint::SlipNormalZero;
    }
    vel_constrained[2 * k] = dm.vel_constraint[2 * k] != VelConstraint::Free;
    vel_constrained[2 * k + 1] =
        dm.vel_constraint[2 * k + 1] != VelConstraint::Free;
    scalar_constrained[k] = dm.scalar_boundary[k];
  }

  dm.mean_zero_pressure = bcs.all_dirichlet();
  dm.velocity = make_constraints(dm.n_velocity, vel_constrained);
  dm.scalar_dirichlet = make_constraints(dm.n_scalar, scalar_constrained);
  return dm;
}

}  // namespace polyrom
