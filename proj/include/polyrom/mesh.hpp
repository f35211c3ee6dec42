#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace polyrom {

// Conforming triangulation of a polygon with tagged boundary segments.
// Immutable after construction; all triangles are counterclockwise.
struct Mesh {
  struct BoundaryEdge {
    int v0 = -1, v1 = -1;  // oriented with the domain on the left
    int tag = -1;          // index into segment_tags
  };

  std::vector<std::array<double, 2>> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<std::string> segment_tags;
  std::vector<int> corners;  // boundary vertices where straight sides meet
  std::map<std::string, double> metadata;

  int tag_id(std::string_view name) const;
  const std::string& tag_name(int id) const { return segment_tags.at(id); }
  double triangle_area(int t) const;
  double area() const;
};

enum class BcKind { Dirichlet, Neumann, Slip };

// Map from boundary segment tag to the boundary condition applied there.
// At least one tag must be Dirichlet; slip edges must be axis-aligned.
struct BoundarySpec {
  std::map<std::string, BcKind> kinds;

  BcKind kind_of(const std::string& tag) const;
  bool all_dirichlet() const;
  bool covers(const Mesh& mesh) const;
};

struct ValidationReport {
  std::vector<std::string> issues;
  bool ok() const { return issues.empty(); }
};

// Checks the Mesh invariants: positive areas, conformity, closed tagged
// boundary loops. Violations are returned as data, not thrown.
ValidationReport validate(const Mesh& mesh);

// Backward-facing step channel: [0,22]x[0,5] minus the block [0,4]x[0,2].
// Tags: inlet, outlet, wall, step_vertical, step_horizontal.
Mesh generate_step_domain(double h_target);

// Channel [0,2.2]x[0,0.4] minus the square obstacle of side 0.05 centered at
// (0.2, 0.2). Tags: inlet, outlet, wall, obstacle. Requires h_target < 0.05.
Mesh generate_obstacle_channel(double h_target);

// Structured nx-by-ny rectangle, tags left/right/bottom/top. Test fixture and
// convergence-study helper.
Mesh generate_rectangle(double x0, double y0, double x1, double y1, int nx,
                        int ny);

// MSH 2.2 ASCII subset: $MeshFormat, $PhysicalNames, $Nodes, $Elements with
// 2-node lines (boundary, tagged) and 3-node triangles only.
Mesh import_msh(const std::string& text);
std::string export_msh(const Mesh& mesh);

// Native plain-text dump, 17 significant digits (lossless f64 round trip).
std::string write_polymesh(const Mesh& mesh);
Mesh read_polymesh(const std::string& text);

// Boundary vertices where adjacent boundary-edge directions differ by more
// than 1e-9 rad. Generators call this; importers recompute it.
std::vector<int> compute_corners(const Mesh& mesh);

}  // namespace polyrom
