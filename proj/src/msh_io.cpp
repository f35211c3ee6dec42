#include <cctype>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "polyrom/errors.hpp"
#include "polyrom/mesh.hpp"

namespace polyrom {

namespace {

struct LineReader {
  std::istringstream in;
  int line_no = 0;
  explicit LineReader(const std::string& text) : in(text) {}
  bool next(std::string& line) {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return true;
    }
    return false;
  }
};

[[noreturn]] void parse_fail(const LineReader& r, const std::string& what) {
  throw IoError("msh parse error at line " + std::to_string(r.line_no) + ": " +
                what);
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Mesh import_msh(const std::string& text) {
  LineReader reader(text);
  std::string line;

  Mesh mesh;
  std::map<long, int> node_index;        // msh node id -> vertex index
  std::map<int, std::string> phys_name;  // physical id -> name (dim 1)
  bool saw_nodes = false, saw_elements = false;

  struct RawLine {
    long a, b;
    int phys;
  };
  struct RawTri {
    long a, b, c;
  };
  std::vector<RawLine> raw_lines;
  std::vector<RawTri> raw_tris;

  while (reader.next(line)) {
    if (line.empty()) continue;
    if (line == "$MeshFormat") {
      if (!reader.next(line)) parse_fail(reader, "truncated $MeshFormat");
      std::istringstream fmt(line);
      std::string version;
      fmt >> version;
      if (version.rfind("2.2", 0) != 0)
        parse_fail(reader, "unsupported msh version '" + version + "'");
      if (!reader.next(line) || line != "$EndMeshFormat")
        parse_fail(reader, "missing $EndMeshFormat");
    } else if (line == "$PhysicalNames") {
      if (!reader.next(line)) parse_fail(reader, "truncated $PhysicalNames");
      int count = 0;
      if (std::sscanf(line.c_str(), "%d", &count) != 1)
        parse_fail(reader, "bad $PhysicalNames count");
      for (int i = 0; i < count; ++i) {
        if (!reader.next(line)) parse_fail(reader, "truncated $PhysicalNames");
        int dim = 0, id = 0;
        std::istringstream row(line);
        if (!(row >> dim >> id)) parse_fail(reader, "bad physical name row");
        std::string rest;
        std::getline(row, rest);
        const auto open = rest.find('"');
        const auto close = rest.rfind('"');
        if (open == std::string::npos || close <= open)
          parse_fail(reader, "physical name must be quoted");
        if (dim == 1)
          phys_name[id] = rest.substr(open + 1, close - open - 1);
      }
      if (!reader.next(line) || line != "$EndPhysicalNames")
        parse_fail(reader, "missing $EndPhysicalNames");
    } else if (line == "$Nodes") {
      saw_nodes = true;
      if (!reader.next(line)) parse_fail(reader, "truncated $Nodes");
      long count = 0;
      if (std::sscanf(line.c_str(), "%ld", &count) != 1 || count < 0)
        parse_fail(reader, "bad $Nodes count");
      for (long i = 0; i < count; ++i) {
        if (!reader.next(line)) parse_fail(reader, "truncated $Nodes");
        long id;
        double x, y, z;
        if (std::sscanf(line.c_str(), "%ld %lf %lf %lf", &id, &x, &y, &z) != 4)
          parse_fail(reader, "bad node row");
        node_index[id] = static_cast<int>(mesh.vertices.size());
        mesh.vertices.push_back({x, y});
      }
      if (!reader.next(line) || line != "$EndNodes")
        parse_fail(reader, "missing $EndNodes");
    } else if (line == "$Elements") {
      saw_elements = true;
      if (!reader.next(line)) parse_fail(reader, "truncated $Elements");
      long count = 0;
      if (std::sscanf(line.c_str(), "%ld", &count) != 1 || count < 0)
        parse_fail(reader, "bad $Elements count");
      for (long i = 0; i < count; ++i) {
        if (!reader.next(line)) parse_fail(reader, "truncated $Elements");
        std::istringstream row(line);
        long id;
        int type, ntags;
        if (!(row >> id >> type >> ntags)) parse_fail(reader, "bad element row");
        std::vector<long> tags(ntags);
        for (int t = 0; t < ntags; ++t)
          if (!(row >> tags[t])) parse_fail(reader, "bad element tags");
        const int phys = ntags > 0 ? static_cast<int>(tags[0]) : 0;
        if (type == 1) {
          long a, b;
          if (!(row >> a >> b)) parse_fail(reader, "bad line element");
          raw_lines.push_back({a, b, phys});
        } else if (type == 2) {
          long a, b, c;
          if (!(row >> a >> b >> c)) parse_fail(reader, "bad triangle element");
          raw_tris.push_back({a, b, c});
        } else {
          throw IoError("msh: unsupported element type " +
                        std::to_string(type) + " at line " +
                        std::to_string(reader.line_no));
        }
      }
      if (!reader.next(line) || line != "$EndElements")
        parse_fail(reader, "missing $EndElements");
    } else if (line[0] == '$') {
      // skip unknown section up to its matching end marker
      const std::string end = "$End" + line.substr(1);
      while (reader.next(line) && line != end) {
      }
    }
  }
  if (!saw_nodes) throw IoError("msh: missing $Nodes section");
  if (!saw_elements) throw IoError("msh: missing $Elements section");

  auto resolve = [&](long id) {
    auto it = node_index.find(id);
    if (it == node_index.end())
      throw IoError("msh: element references unknown node " +
                    std::to_string(id));
    return it->second;
  };

  for (const auto& t : raw_tris) {
    std::array<int, 3> tri{resolve(t.a), resolve(t.b), resolve(t.c)};
    mesh.triangles.push_back(tri);
    if (mesh.triangle_area(static_cast<int>(mesh.triangles.size()) - 1) < 0)
      std::swap(mesh.triangles.back()[1], mesh.triangles.back()[2]);
  }

  std::map<int, int> tag_of_phys;
  for (const auto& l : raw_lines) {
    auto it = tag_of_phys.find(l.phys);
    if (it == tag_of_phys.end()) {
      auto named = phys_name.find(l.phys);
      const std::string name = named != phys_name.end()
                                   ? named->second
                                   : "phys_" + std::to_string(l.phys);
      it = tag_of_phys.emplace(l.phys, mesh.tag_id(name)).first;
      if (it->second < 0) {
        it->second = static_cast<int>(mesh.segment_tags.size());
        mesh.segment_tags.push_back(name);
      }
    }
    mesh.boundary_edges.push_back({resolve(l.a), resolve(l.b), it->second});
  }
  mesh.corners = compute_corners(mesh);
  return mesh;
}

std::string export_msh(const Mesh& mesh) {
  std::ostringstream out;
  out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
  out << "$PhysicalNames\n" << mesh.segment_tags.size() << "\n";
  for (std::size_t i = 0; i < mesh.segment_tags.size(); ++i)
    out << "1 " << (i + 1) << " \"" << mesh.segment_tags[i] << "\"\n";
  out << "$EndPhysicalNames\n";
  out << "$Nodes\n" << mesh.vertices.size() << "\n";
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
    out << (i + 1) << " " << fmt17(mesh.vertices[i][0]) << " "
        << fmt17(mesh.vertices[i][1]) << " 0\n";
  out << "$EndNodes\n";
  out << "$Elements\n"
      << (mesh.boundary_edges.size() + mesh.triangles.size()) << "\n";
  long id = 1;
  for (const auto& be : mesh.boundary_edges)
    out << id++ << " 1 2 " << (be.tag + 1) << " " << (be.tag + 1) << " "
        << (be.v0 + 1) << " " << (be.v1 + 1) << "\n";
  for (const auto& tri : mesh.triangles)
    out << id++ << " 2 2 0 0 " << (tri[0] + 1) << " " << (tri[1] + 1) << " "
        << (tri[2] + 1) << "\n";
  out << "$EndElements\n";
  return out.str();
}

std::string write_polymesh(const Mesh& mesh) {
  std::ostringstream out;
  out << "POLYMESH v1\n";
  out << mesh.vertices.size() << "\n";
  for (const auto& v : mesh.vertices)
    out << fmt17(v[0]) << " " << fmt17(v[1]) << "\n";
  out << mesh.triangles.size() << "\n";
  for (const auto& t : mesh.triangles)
    out << t[0] << " " << t[1] << " " << t[2] << "\n";
  out << mesh.boundary_edges.size() << "\n";
  for (const auto& be : mesh.boundary_edges)
    out << be.v0 << " " << be.v1 << " " << mesh.tag_name(be.tag) << "\n";
  out << mesh.metadata.size() << "\n";
  for (const auto& [key, value] : mesh.metadata)
    out << key << " " << fmt17(value) << "\n";
  return out.str();
}

Mesh read_polymesh(const std::string& text) {
  LineReader reader(text);
  std::string line;
  if (!reader.next(line) || line != "POLYMESH v1")
    throw IoError("polymesh: bad header");
  auto next_line = [&]() -> std::string {
    std::string l;
    if (!reader.next(l)) parse_fail(reader, "unexpected end of polymesh");
    return l;
  };

  Mesh mesh;
  long nv = std::stol(next_line());
  mesh.vertices.reserve(nv);
  for (long i = 0; i < nv; ++i) {
    double x, y;
    if (std::sscanf(next_line().c_str(), "%lf %lf", &x, &y) != 2)
      parse_fail(reader, "bad vertex row");
    mesh.vertices.push_back({x, y});
  }
  long nt = std::stol(next_line());
  mesh.triangles.reserve(nt);
  for (long i = 0; i < nt; ++i) {
    int a, b, c;
    if (std::sscanf(next_line().c_str(), "%d %d %d", &a, &b, &c) != 3)
      parse_fail(reader, "bad triangle row");
    mesh.triangles.push_back({a, b, c});
  }
  long nbe = std::stol(next_line());
  mesh.boundary_edges.reserve(nbe);
  for (long i = 0; i < nbe; ++i) {
    std::istringstream row(next_line());
    int a, b;
    std::string tag;
    if (!(row >> a >> b >> tag)) parse_fail(reader, "bad boundary edge row");
    std::string rest;
    if (std::getline(row, rest) && !rest.empty()) {
      // tags may contain spaces
      tag += rest;
    }
    int id = mesh.tag_id(tag);
    if (id < 0) {
      id = static_cast<int>(mesh.segment_tags.size());
      mesh.segment_tags.push_back(tag);
    }
    mesh.boundary_edges.push_back({a, b, id});
  }
  // metadata section is optional (older dumps end at the boundary edges)
  std::string meta_count;
  if (reader.next(meta_count)) {
    const long nm = std::stol(meta_count);
    for (long i = 0; i < nm; ++i) {
      std::istringstream row(next_line());
      std::string key;
      double value;
      if (!(row >> key >> value)) parse_fail(reader, "bad metadata row");
      mesh.metadata[key] = value;
    }
  }
  mesh.corners = compute_corners(mesh);
  return mesh;
}

}  // namespace polyrom
