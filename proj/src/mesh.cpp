#include "polyrom/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

#include "polyrom/errors.hpp"

namespace polyrom {

int Mesh::tag_id(std::string_view name) const {
  for (std::size_t i = 0; i < segment_tags.size(); ++i)
    if (segment_tags[i] == name) return static_cast<int>(i);
  return -1;
}

double Mesh::triangle_area(int t) const {
  const auto& tri = triangles[t];
  const auto& a = vertices[tri[0]];
  const auto& b = vertices[tri[1]];
  const auto& c = vertices[tri[2]];
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
}

double Mesh::area() const {
  double sum = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t)
    sum += triangle_area(static_cast<int>(t));
  return sum;
}

BcKind BoundarySpec::kind_of(const std::string& tag) const {
  auto it = kinds.find(tag);
  if (it == kinds.end())
    throw ConfigError("boundary spec does not cover tag '" + tag + "'");
  return it->second;
}

bool BoundarySpec::all_dirichlet() const {
  for (const auto& [tag, kind] : kinds)
    if (kind != BcKind::Dirichlet) return false;
  return !kinds.empty();
}

bool BoundarySpec::covers(const Mesh& mesh) const {
  for (const auto& name : mesh.segment_tags)
    if (kinds.find(name) == kinds.end()) return false;
  return true;
}

namespace {

std::pair<int, int> undirected(int a, int b) {
  return a < b ? std::pair{a, b} : std::pair{b, a};
}

}  // namespace

ValidationReport validate(const Mesh& mesh) {
  ValidationReport report;
  const int nv = static_cast<int>(mesh.vertices.size());

  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    bool in_range = true;
    for (int k = 0; k < 3; ++k)
      if (tri[k] < 0 || tri[k] >= nv) {
        report.issues.push_back("triangle " + std::to_string(t) +
                                " references invalid vertex " +
                                std::to_string(tri[k]));
        in_range = false;
      }
    if (!in_range) continue;
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
      report.issues.push_back("triangle " + std::to_string(t) +
                              " has repeated vertices");
    else if (mesh.triangle_area(static_cast<int>(t)) <= 0.0)
      report.issues.push_back("negative area at triangle " + std::to_string(t));
  }

  // Edge incidence: interior edges belong to two triangles, boundary to one.
  std::map<std::pair<int, int>, int> incidence;
  for (const auto& tri : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      auto e = undirected(tri[k], tri[(k + 1) % 3]);
      ++incidence[e];
    }
  }
  for (const auto& [e, count] : incidence) {
    if (count > 2)
      report.issues.push_back("nonconforming edge (" + std::to_string(e.first) +
                              "," + std::to_string(e.second) + ") shared by " +
                              std::to_string(count) + " triangles");
  }

  std::map<std::pair<int, int>, int> tagged;  // boundary edge -> #tag entries
  for (const auto& be : mesh.boundary_edges) {
    if (be.v0 < 0 || be.v0 >= nv || be.v1 < 0 || be.v1 >= nv) {
      report.issues.push_back("boundary edge references invalid vertex");
      continue;
    }
    if (be.tag < 0 || be.tag >= static_cast<int>(mesh.segment_tags.size()))
      report.issues.push_back("boundary edge (" + std::to_string(be.v0) + "," +
                              std::to_string(be.v1) + ") has invalid tag");
    ++tagged[undirected(be.v0, be.v1)];
  }
  for (const auto& [e, n] : tagged) {
    auto it = incidence.find(e);
    if (it == incidence.end() || it->second != 1)
      report.issues.push_back("tagged edge (" + std::to_string(e.first) + "," +
                              std::to_string(e.second) +
                              ") is not a topological boundary edge");
    if (n != 1)
      report.issues.push_back("boundary edge (" + std::to_string(e.first) +
                              "," + std::to_string(e.second) + ") tagged " +
                              std::to_string(n) + " times");
  }
  for (const auto& [e, count] : incidence) {
    if (count == 1 && tagged.find(e) == tagged.end())
      report.issues.push_back("topological boundary edge (" +
                              std::to_string(e.first) + "," +
                              std::to_string(e.second) + ") carries no tag");
  }

  // Closed loops: every boundary vertex has exactly two incident boundary
  // edges.
  std::map<int, int> degree;
  for (const auto& [e, count] : incidence) {
    if (count == 1) {
      ++degree[e.first];
      ++degree[e.second];
    }
  }
  for (const auto& [v, d] : degree) {
    if (d != 2)
      report.issues.push_back("boundary not closed at vertex " +
                              std::to_string(v) + " (degree " +
                              std::to_string(d) + ")");
  }
  return report;
}

std::vector<int> compute_corners(const Mesh& mesh) {
  // next boundary edge per start vertex (edges are oriented domain-left)
  std::map<int, std::array<double, 2>> outgoing;
  std::map<int, std::array<double, 2>> incoming;
  for (const auto& be : mesh.boundary_edges) {
    const auto& a = mesh.vertices[be.v0];
    const auto& b = mesh.vertices[be.v1];
    std::array<double, 2> d{b[0] - a[0], b[1] - a[1]};
    outgoing[be.v0] = d;
    incoming[be.v1] = d;
  }
  std::vector<int> corners;
  for (const auto& [v, dout] : outgoing) {
    auto it = incoming.find(v);
    if (it == incoming.end()) continue;
    const auto& din = it->second;
    const double cross = din[0] * dout[1] - din[1] * dout[0];
    const double dot = din[0] * dout[0] + din[1] * dout[1];
    if (std::abs(std::atan2(cross, dot)) > 1e-9) corners.push_back(v);
  }
  std::sort(corners.begin(), corners.end());
  return corners;
}

namespace {

// Block-structured generator: axis-aligned rectangles on shared break lines,
// each gridded to ~h_target and split into two CCW triangles.
struct BlockGridSpec {
  std::vector<double> x_breaks, y_breaks;
  std::function<bool(int, int)> block_present;
  // tag name for a boundary edge with endpoints (ax,ay)-(bx,by)
  std::function<std::string(double, double, double, double)> tag_of;
};

std::vector<double> subdivide(const std::vector<double>& breaks, double h) {
  std::vector<double> lines;
  lines.push_back(breaks.front());
  for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
    const double lo = breaks[b], hi = breaks[b + 1];
    const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / h - 1e-12)));
    for (int i = 1; i <= n; ++i)
      lines.push_back(lo + (hi - lo) * static_cast<double>(i) / n);
  }
  return lines;
}

int interval_of(const std::vector<double>& breaks, double mid) {
  for (std::size_t b = 0; b + 1 < breaks.size(); ++b)
    if (mid >= breaks[b] && mid <= breaks[b + 1]) return static_cast<int>(b);
  return -1;
}

Mesh generate_block_grid(const BlockGridSpec& spec, double h_target) {
  if (h_target <= 0) throw ConfigError("h_target must be positive");
  Mesh mesh;
  const auto xs = subdivide(spec.x_breaks, h_target);
  const auto ys = subdivide(spec.y_breaks, h_target);
  const int nx = static_cast<int>(xs.size()) - 1;
  const int ny = static_cast<int>(ys.size()) - 1;

  auto cell_present = [&](int i, int j) {
    if (i < 0 || j < 0 || i >= nx || j >= ny) return false;
    const int bi = interval_of(spec.x_breaks, 0.5 * (xs[i] + xs[i + 1]));
    const int bj = interval_of(spec.y_breaks, 0.5 * (ys[j] + ys[j + 1]));
    return spec.block_present(bi, bj);
  };

  std::vector<int> vid(static_cast<std::size_t>(nx + 1) * (ny + 1), -1);
  auto vertex = [&](int i, int j) {
    int& id = vid[static_cast<std::size_t>(j) * (nx + 1) + i];
    if (id < 0) {
      id = static_cast<int>(mesh.vertices.size());
      mesh.vertices.push_back({xs[i], ys[j]});
    }
    return id;
  };

  std::map<std::string, int> tag_ids;
  auto tag = [&](double ax, double ay, double bx, double by) {
    const std::string name = spec.tag_of(ax, ay, bx, by);
    auto [it, inserted] = tag_ids.try_emplace(
        name, static_cast<int>(mesh.segment_tags.size()));
    if (inserted) mesh.segment_tags.push_back(name);
    return it->second;
  };

  auto add_boundary = [&](int va, int vb) {
    const auto& a = mesh.vertices[va];
    const auto& b = mesh.vertices[vb];
    mesh.boundary_edges.push_back({va, vb, tag(a[0], a[1], b[0], b[1])});
  };

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (!cell_present(i, j)) continue;
      const int v00 = vertex(i, j), v10 = vertex(i + 1, j);
      const int v11 = vertex(i + 1, j + 1), v01 = vertex(i, j + 1);
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
      // boundary sides, oriented with the domain on the left
      if (!cell_present(i, j - 1)) add_boundary(v00, v10);
      if (!cell_present(i + 1, j)) add_boundary(v10, v11);
      if (!cell_present(i, j + 1)) add_boundary(v11, v01);
      if (!cell_present(i - 1, j)) add_boundary(v01, v00);
    }
  }
  mesh.corners = compute_corners(mesh);
  return mesh;
}

bool near(double a, double b) { return std::abs(a - b) < 1e-12; }

}  // namespace

Mesh generate_step_domain(double h_target) {
  BlockGridSpec spec;
  spec.x_breaks = {0.0, 4.0, 22.0};
  spec.y_breaks = {0.0, 2.0, 5.0};
  spec.block_present = [](int bi, int bj) { return !(bi == 0 && bj == 0); };
  spec.tag_of = [](double ax, double ay, double bx, double by) -> std::string {
    const double x = 0.5 * (ax + bx), y = 0.5 * (ay + by);
    if (near(ax, bx)) {  // vertical edge
      if (near(x, 0.0)) return "inlet";
      if (near(x, 22.0)) return "outlet";
      if (near(x, 4.0) && y < 2.0) return "step_vertical";
    } else {  // horizontal edge
      if (near(y, 5.0) || near(y, 0.0)) return "wall";
      if (near(y, 2.0) && x < 4.0) return "step_horizontal";
    }
    throw std::logic_error("untagged boundary edge in step domain");
  };
  return generate_block_grid(spec, h_target);
}

Mesh generate_obstacle_channel(double h_target) {
  constexpr double kSide = 0.05, kCx = 0.2, kCy = 0.2;
  constexpr double kLx = 2.2, kLy = 0.4;
  if (h_target <= 0) throw ConfigError("h_target must be positive");
  if (h_target >= kSide)
    throw ConfigError("h_target must be below the obstacle side 0.05");
  const double x0 = kCx - kSide / 2, x1 = kCx + kSide / 2;
  const double y0 = kCy - kSide / 2, y1 = kCy + kSide / 2;

  BlockGridSpec spec;
  spec.x_breaks = {0.0, x0, x1, kLx};
  spec.y_breaks = {0.0, y0, y1, kLy};
  spec.block_present = [](int bi, int bj) { return !(bi == 1 && bj == 1); };
  spec.tag_of = [&](double ax, double ay, double bx, double by) -> std::string {
    const double x = 0.5 * (ax + bx), y = 0.5 * (ay + by);
    if (near(x, 0.0)) return "inlet";
    if (near(x, kLx)) return "outlet";
    if (near(y, 0.0) || near(y, kLy)) return "wall";
    if (x >= x0 - 1e-12 && x <= x1 + 1e-12 && y >= y0 - 1e-12 &&
        y <= y1 + 1e-12)
      return "obstacle";
    throw std::logic_error("untagged boundary edge in obstacle channel");
  };
  Mesh mesh = generate_block_grid(spec, h_target);
  // grid lines pass exactly through the obstacle faces, realized == nominal
  mesh.metadata["obstacle_x0"] = x0;
  mesh.metadata["obstacle_x1"] = x1;
  mesh.metadata["obstacle_y0"] = y0;
  mesh.metadata["obstacle_y1"] = y1;
  return mesh;
}

Mesh generate_rectangle(double x0, double y0, double x1, double y1, int nx,
                        int ny) {
  if (nx < 1 || ny < 1 || x1 <= x0 || y1 <= y0)
    throw ConfigError("invalid rectangle parameters");
  BlockGridSpec spec;
  spec.x_breaks = {x0, x1};
  spec.y_breaks = {y0, y1};
  spec.block_present = [](int, int) { return true; };
  spec.tag_of = [&](double ax, double ay, double bx, double by) -> std::string {
    if (near(ax, bx)) return near(ax, x0) ? "left" : "right";
    return near(ay, y0) ? "bottom" : "top";
  };
  const double h = std::max((x1 - x0) / nx, (y1 - y0) / ny);
  // subdivide() recovers exactly nx, ny cells for this h
  BlockGridSpec refined = spec;
  refined.x_breaks.clear();
  refined.y_breaks.clear();
  for (int i = 0; i <= nx; ++i)
    refined.x_breaks.push_back(x0 + (x1 - x0) * static_cast<double>(i) / nx);
  for (int j = 0; j <= ny; ++j)
    refined.y_breaks.push_back(y0 + (y1 - y0) * static_cast<double>(j) / ny);
  return generate_block_grid(refined, 2 * h);
}

}  // namespace polyrom
