#include "polyrom/assembly.hpp"

#include <cmath>

#include "polyrom/element.hpp"
#include "polyrom/parallel.hpp"
#include "polyrom/quadrature.hpp"

namespace polyrom {

namespace {

using Trip = Eigen::Triplet<double>;

// Shape data tabulated at the quadrature points once per assembly call.
struct QuadTab {
  std::vector<double> w;                                  // weight (ref)
  std::vector<std::array<double, 6>> n2;                  // P2 values
  std::vector<std::array<std::array<double, 2>, 6>> d2;   // P2 ref gradients
  std::vector<std::array<double, 3>> n1;                  // P1 values
  std::vector<std::array<double, 2>> xy;                  // ref coords
};

QuadTab tabulate(const QuadRule& rule) {
  QuadTab tab;
  tab.w.reserve(rule.points.size());
  for (const auto& q : rule.points) {
    tab.w.push_back(q.w);
    tab.xy.push_back({q.x, q.y});
    std::array<double, 6> n;
    p2_shape(q.x, q.y, n);
    tab.n2.push_back(n);
    std::array<std::array<double, 2>, 6> d;
    p2_shape_grad_ref(q.x, q.y, d);
    tab.d2.push_back(d);
    std::array<double, 3> m;
    p1_shape(q.x, q.y, m);
    tab.n1.push_back(m);
  }
  return tab;
}

// Element loop producing triplets; one buffer per chunk, concatenated in
// chunk order so the matrix is bitwise independent of the thread count.
template <class LocalFn>
SparseMat assemble_elements(int rows, int cols, int n_elems, int nnz_per_elem,
                            LocalFn&& local) {
  const auto ranges = chunk_ranges(0, static_cast<std::size_t>(n_elems));
  std::vector<std::vector<Trip>> buf(ranges.size());
  parallel_chunks(0, static_cast<std::size_t>(n_elems),
                  [&](std::size_t w, std::size_t lo, std::size_t hi) {
                    buf[w].reserve((hi - lo) * nnz_per_elem);
                    for (std::size_t t = lo; t < hi; ++t)
                      local(static_cast<int>(t), buf[w]);
                  });
  std::vector<Trip> trips;
  std::size_t total = 0;
  for (const auto& b : buf) total += b.size();
  trips.reserve(total);
  for (const auto& b : buf) trips.insert(trips.end(), b.begin(), b.end());
  SparseMat A(rows, cols);
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

// Physical P2 gradients for one element at every quadrature point.
void physical_grads(const TriGeom& g, const QuadTab& tab,
                    std::vector<std::array<std::array<double, 2>, 6>>& out) {
  out.resize(tab.w.size());
  for (std::size_t q = 0; q < tab.w.size(); ++q)
    for (int i = 0; i < 6; ++i) out[q][i] = g.grad(tab.d2[q][i]);
}

void push_symmetric(std::vector<Trip>& sink, const std::array<int, 6>& dofs,
                    const double local[6][6]) {
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      sink.emplace_back(dofs[i], dofs[j], local[i][j]);
}

}  // namespace

SparseMat assemble_scalar_stiffness(const DofMap& dm) {
  const QuadTab tab = tabulate(tri_rule_degree6());
  const Mesh& mesh = *dm.mesh;
  return assemble_elements(
      dm.n_scalar, dm.n_scalar, static_cast<int>(mesh.triangles.size()), 36,
      [&](int t, std::vector<Trip>& sink) {
        const TriGeom g = tri_geometry(mesh, t);
        const auto dofs = element_scalar_dofs(dm, t);
        std::vector<std::array<std::array<double, 2>, 6>> pg;
        physical_grads(g, tab, pg);
        double local[6][6] = {};
        for (std::size_t q = 0; q < tab.w.size(); ++q) {
          const double wq = tab.w[q] * g.area;
          for (int i = 0; i < 6; ++i)
            for (int j = i; j < 6; ++j)
              local[i][j] += wq * (pg[q][i][0] * pg[q][j][0] +
                                   pg[q][i][1] * pg[q][j][1]);
        }
        for (int i = 0; i < 6; ++i)
          for (int j = 0; j < i; ++j) local[i][j] = local[j][i];
        push_symmetric(sink, dofs, local);
      });
}

SparseMat assemble_scalar_mass(const DofMap& dm) {
  const QuadTab tab = tabulate(tri_rule_degree6());
  const Mesh& mesh = *dm.mesh;
  return assemble_elements(
      dm.n_scalar, dm.n_scalar, static_cast<int>(mesh.triangles.size()), 36,
      [&](int t, std::vector<Trip>& sink) {
        const TriGeom g = tri_geometry(mesh, t);
        const auto dofs = element_scalar_dofs(dm, t);
        double local[6][6] = {};
        for (std::size_t q = 0; q < tab.w.size(); ++q) {
          const double wq = tab.w[q] * g.area;
          for (int i = 0; i < 6; ++i)
            for (int j = i; j < 6; ++j)
              local[i][j] += wq * tab.n2[q][i] * tab.n2[q][j];
        }
        for (int i = 0; i < 6; ++i)
          for (int j = 0; j < i; ++j) local[i][j] = local[j][i];
        push_symmetric(sink, dofs, local);
      });
}

SparseMat assemble_viscous(const DofMap& dm, double nu, ViscousForm form) {
  const QuadTab tab = tabulate(tri_rule_degree6());
  const Mesh& mesh = *dm.mesh;
  const bool sym = form == ViscousForm::SymGrad;
  return assemble_elements(
      dm.n_velocity, dm.n_velocity, static_cast<int>(mesh.triangles.size()),
      144, [&](int t, std::vector<Trip>& sink) {
        const TriGeom g = tri_geometry(mesh, t);
        const auto dofs = element_scalar_dofs(dm, t);
        std::vector<std::array<std::array<double, 2>, 6>> pg;
        physical_grads(g, tab, pg);
        // 12x12 local, ordered (node, component) interleaved.
        double local[12][12] = {};
        for (std::size_t q = 0; q < tab.w.size(); ++q) {
          const double wq = tab.w[q] * g.area;
          for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j) {
              const double dot = pg[q][i][0] * pg[q][j][0] +
                                 pg[q][i][1] * pg[q][j][1];
              if (sym) {
                // 2*(eps(phi_i e_c), eps(phi_j e_d))
                //   = delta_cd grad.grad + d_d phi_i d_c phi_j
                for (int c = 0; c < 2; ++c)
                  for (int d = 0; d < 2; ++d) {
                    double v = pg[q][i][d] * pg[q][j][c];
                    if (c == d) v += dot;
                    local[2 * i + c][2 * j + d] += wq * nu * v;
                  }
              } else {
                local[2 * i][2 * j] += wq * nu * dot;
                local[2 * i + 1][2 * j + 1] += wq * nu * dot;
              }
            }
          }
        }
        // Exact symmetry: mirror the upper triangle of the local block.
        for (int a = 0; a < 12; ++a)
          for (int b = 0; b < a; ++b) local[a][b] = local[b][a];
        for (int i = 0; i < 6; ++i)
          for (int c = 0; c < 2; ++c)
            for (int j = 0; j < 6; ++j)
              for (int d = 0; d < 2; ++d)
                sink.emplace_back(2 * dofs[i] + c, 2 * dofs[j] + d,
                                  local[2 * i + c][2 * j + d]);
      });
}

SparseMat assemble_divergence(const DofMap& dm) {
  const QuadTab tab = tabulate(tri_rule_degree6());
  const Mesh& mesh = *dm.mesh;
  return assemble_elements(
      dm.n_pressure, dm.n_velocity, static_cast<int>(mesh.triangles.size()),
      36, [&](int t, std::vector<Trip>& sink) {
        const TriGeom g = tri_geometry(mesh, t);
        const auto vdofs = element_scalar_dofs(dm, t);
        const auto pdofs = element_pressure_dofs(dm, t);
        std::vector<std::array<std::array<double, 2>, 6>> pg;
        physical_grads(g, tab, pg);
        double local[3][12] = {};
        for (std::size_t q = 0; q < tab.w.size(); ++q) {
          const double wq = tab.w[q] * g.area;
          for (int l = 0; l < 3; ++l)
            for (int j = 0; j < 6; ++j)
              for (int d = 0; d < 2; ++d)
                local[l][2 * j + d] -= wq * tab.n1[q][l] * pg[q][j][d];
        }
        for (int l = 0; l < 3; ++l)
          for (int j = 0; j < 6; ++j)
            for (int d = 0; d < 2; ++d)
              sink.emplace_back(pdofs[l], 2 * vdofs[j] + d,
                                local[l][2 * j + d]);
      });
}

SparseMat assemble_convection(const DofMap& dm, const Vec& w) {
  const QuadTab tab = tabulate(tri_rule_degree6());
  const Mesh& mesh = *dm.mesh;
  return assemble_elements(
      dm.n_velocity, dm.n_velocity, static_cast<int>(mesh.triangles.size()),
      72, [&](int t, std::vector<Trip>& sink) {
        const TriGeom g = tri_geometry(mesh, t);
        const auto dofs = element_scalar_dofs(dm, t);
        std::vector<std::array<std::array<double, 2>, 6>> pg;
        physical_grads(g, tab, pg);
        double local[6][6] = {};  // scalar kernel, identical per component
        for (std::size_t q = 0; q < tab.w.size(); ++q) {
          const double wq = tab.w[q] * g.area;
          double wx = 0.0, wy = 0.0;
          for (int k = 0; k < 6; ++k) {
            wx += w[2 * dofs[k]] * tab.n2[q][k];
            wy += w[2 * dofs[k] + 1] * tab.n2[q][k];
          }
          for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
              local[i][j] +=
                  wq * (wx * pg[q][j][0] + wy * pg[q][j][1]) * tab.n2[q][i];
        }
        for (int i = 0; i < 6; ++i)
          for (int j = 0; j < 6; ++j)
            for (int c = 0; c < 2; ++c)
              sink.emplace_back(2 * dofs[i] + c, 2 * dofs[j] + c, local[i][j]);
      });
}

SparseMat assemble_convection_jacobian(const DofMap& dm, const Vec& u) {
  const QuadTab tab = tabulate(tri_rule_degree6());
  const Mesh& mesh = *dm.mesh;
  return assemble_elements(
      dm.n_velocity, dm.n_velocity, static_cast<int>(mesh.triangles.size()),
      144, [&](int t, std::vector<Trip>& sink) {
        const TriGeom g = tri_geometry(mesh, t);
        const auto dofs = element_scalar_dofs(dm, t);
        std::vector<std::array<std::array<double, 2>, 6>> pg;
        physical_grads(g, tab, pg);
        double local[12][12] = {};
        for (std::size_t q = 0; q < tab.w.size(); ++q) {
          const double wq = tab.w[q] * g.area;
          // grad u at the quadrature point: gu[c][d] = d_d u_c
          double gu[2][2] = {};
          for (int k = 0; k < 6; ++k)
            for (int c = 0; c < 2; ++c)
              for (int d = 0; d < 2; ++d)
                gu[c][d] += u[2 * dofs[k] + c] * pg[q][k][d];
          for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) {
              const double nn = wq * tab.n2[q][i] * tab.n2[q][j];
              for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d)
                  local[2 * i + c][2 * j + d] += nn * gu[c][d];
            }
        }
        for (int i = 0; i < 6; ++i)
          for (int c = 0; c < 2; ++c)
            for (int j = 0; j < 6; ++j)
              for (int d = 0; d < 2; ++d)
                sink.emplace_back(2 * dofs[i] + c, 2 * dofs[j] + d,
                                  local[2 * i + c][2 * j + d]);
      });
}

SparseMat assemble_h1_gram(const DofMap& dm, GramSpace space,
                           bool include_mass) {
  SparseMat scalar = assemble_scalar_stiffness(dm);
  if (include_mass) {
    SparseMat mass = assemble_scalar_mass(dm);
    scalar = scalar + mass;
  }
  if (space == GramSpace::Scalar) return scalar;
  // Expand to the interleaved velocity space, block-diagonal per component.
  std::vector<Trip> trips;
  trips.reserve(2 * scalar.nonZeros());
  for (int k = 0; k < scalar.outerSize(); ++k)
    for (SparseMat::InnerIterator it(scalar, k); it; ++it)
      for (int c = 0; c < 2; ++c)
        trips.emplace_back(2 * static_cast<int>(it.row()) + c,
                           2 * static_cast<int>(it.col()) + c, it.value());
  SparseMat G(dm.n_velocity, dm.n_velocity);
  G.setFromTriplets(trips.begin(), trips.end());
  return G;
}

SparseMat assemble_l2_gram_pressure(const DofMap& dm) {
  const QuadTab tab = tabulate(tri_rule_degree6());
  const Mesh& mesh = *dm.mesh;
  return assemble_elements(
      dm.n_pressure, dm.n_pressure, static_cast<int>(mesh.triangles.size()), 9,
      [&](int t, std::vector<Trip>& sink) {
        const TriGeom g = tri_geometry(mesh, t);
        const auto pdofs = element_pressure_dofs(dm, t);
        double local[3][3] = {};
        for (std::size_t q = 0; q < tab.w.size(); ++q) {
          const double wq = tab.w[q] * g.area;
          for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j)
              local[i][j] += wq * tab.n1[q][i] * tab.n1[q][j];
        }
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < i; ++j) local[i][j] = local[j][i];
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            sink.emplace_back(pdofs[i], pdofs[j], local[i][j]);
      });
}

SparseMat assemble_l2_gram_velocity(const DofMap& dm) {
  SparseMat mass = assemble_scalar_mass(dm);
  std::vector<Trip> trips;
  trips.reserve(2 * mass.nonZeros());
  for (int k = 0; k < mass.outerSize(); ++k)
    for (SparseMat::InnerIterator it(mass, k); it; ++it)
      for (int c = 0; c < 2; ++c)
        trips.emplace_back(2 * static_cast<int>(it.row()) + c,
                           2 * static_cast<int>(it.col()) + c, it.value());
  SparseMat G(dm.n_velocity, dm.n_velocity);
  G.setFromTriplets(trips.begin(), trips.end());
  return G;
}

Vec assemble_velocity_load(
    const DofMap& dm,
    const std::function<std::array<double, 2>(double, double)>& f) {
  const QuadTab tab = tabulate(tri_rule_degree6());
  const Mesh& mesh = *dm.mesh;
  Vec F = Vec::Zero(dm.n_velocity);
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const TriGeom g = tri_geometry(mesh, t);
    const auto dofs = element_scalar_dofs(dm, t);
    for (std::size_t q = 0; q < tab.w.size(); ++q) {
      const double wq = tab.w[q] * g.area;
      const auto xy = g.map(tab.xy[q][0], tab.xy[q][1]);
      const auto fv = f(xy[0], xy[1]);
      for (int i = 0; i < 6; ++i) {
        F[2 * dofs[i]] += wq * fv[0] * tab.n2[q][i];
        F[2 * dofs[i] + 1] += wq * fv[1] * tab.n2[q][i];
      }
    }
  }
  return F;
}

Vec velocity_load_from_scalar(const DofMap& dm, const Vec& scalar_coeffs,
                              int component) {
  SparseMat M = assemble_scalar_mass(dm);
  Vec mg = M * scalar_coeffs;
  Vec F = Vec::Zero(dm.n_velocity);
  for (int j = 0; j < dm.n_scalar; ++j) F[2 * j + component] = mg[j];
  return F;
}

SparseMat reduce_matrix(const SparseMat& A, const Constraints& rows,
                        const Constraints& cols) {
  std::vector<Trip> trips;
  trips.reserve(A.nonZeros());
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMat::InnerIterator it(A, k); it; ++it) {
      const int r = rows.full_to_reduced[it.row()];
      const int c = cols.full_to_reduced[it.col()];
      if (r >= 0 && c >= 0) trips.emplace_back(r, c, it.value());
    }
  SparseMat R(rows.reduced_size(), cols.reduced_size());
  R.setFromTriplets(trips.begin(), trips.end());
  return R;
}

Vec reduce_vector(const Vec& v, const Constraints& c) {
  Vec r(c.reduced_size());
  for (int k = 0; k < c.reduced_size(); ++k) r[k] = v[c.keep[k]];
  return r;
}

Vec scatter_free(const Vec& reduced, const Constraints& c) {
  Vec v = Vec::Zero(c.full_size);
  for (int k = 0; k < c.reduced_size(); ++k) v[c.keep[k]] = reduced[k];
  return v;
}

Vec interpolate_scalar(const DofMap& dm,
                       const std::function<double(double, double)>& f) {
  Vec v(dm.n_scalar);
  for (int k = 0; k < dm.n_scalar; ++k) {
    const auto xy = dm.scalar_node_coord(k);
    v[k] = f(xy[0], xy[1]);
  }
  return v;
}

Vec interpolate_velocity(
    const DofMap& dm,
    const std::function<std::array<double, 2>(double, double)>& f) {
  Vec v(dm.n_velocity);
  for (int k = 0; k < dm.n_scalar; ++k) {
    const auto xy = dm.scalar_node_coord(k);
    const auto fv = f(xy[0], xy[1]);
    v[2 * k] = fv[0];
    v[2 * k + 1] = fv[1];
  }
  return v;
}

Vec interpolate_pressure(const DofMap& dm,
                         const std::function<double(double, double)>& f) {
  Vec v(dm.n_pressure);
  for (int k = 0; k < dm.n_pressure; ++k) {
    const auto& xy = dm.mesh->vertices[k];
    v[k] = f(xy[0], xy[1]);
  }
  return v;
}

double velocity_h1_error(
    const DofMap& dm, const Vec& u,
    const std::function<std::array<double, 2>(double, double)>& value,
    const std::function<std::array<double, 4>(double, double)>& grad) {
  const QuadTab tab = tabulate(tri_rule_degree6());
  const Mesh& mesh = *dm.mesh;
  double acc = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const TriGeom g = tri_geometry(mesh, t);
    const auto dofs = element_scalar_dofs(dm, t);
    std::vector<std::array<std::array<double, 2>, 6>> pg;
    physical_grads(g, tab, pg);
    for (std::size_t q = 0; q < tab.w.size(); ++q) {
      const double wq = tab.w[q] * g.area;
      const auto xy = g.map(tab.xy[q][0], tab.xy[q][1]);
      double uh[2] = {0, 0};
      double gh[2][2] = {};
      for (int k = 0; k < 6; ++k)
        for (int c = 0; c < 2; ++c) {
          const double coef = u[2 * dofs[k] + c];
          uh[c] += coef * tab.n2[q][k];
          gh[c][0] += coef * pg[q][k][0];
          gh[c][1] += coef * pg[q][k][1];
        }
      const auto uv = value(xy[0], xy[1]);
      const auto gv = grad(xy[0], xy[1]);
      const double ev[2] = {uh[0] - uv[0], uh[1] - uv[1]};
      const double eg[4] = {gh[0][0] - gv[0], gh[0][1] - gv[1],
                            gh[1][0] - gv[2], gh[1][1] - gv[3]};
      acc += wq * (ev[0] * ev[0] + ev[1] * ev[1] + eg[0] * eg[0] +
                   eg[1] * eg[1] + eg[2] * eg[2] + eg[3] * eg[3]);
    }
  }
  return std::sqrt(acc);
}

double pressure_l2_error(const DofMap& dm, const Vec& p,
                         const std::function<double(double, double)>& value) {
  const QuadTab tab = tabulate(tri_rule_degree6());
  const Mesh& mesh = *dm.mesh;
  double acc = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const TriGeom g = tri_geometry(mesh, t);
    const auto pdofs = element_pressure_dofs(dm, t);
    for (std::size_t q = 0; q < tab.w.size(); ++q) {
      const double wq = tab.w[q] * g.area;
      const auto xy = g.map(tab.xy[q][0], tab.xy[q][1]);
      double ph = 0.0;
      for (int l = 0; l < 3; ++l) ph += p[pdofs[l]] * tab.n1[q][l];
      const double e = ph - value(xy[0], xy[1]);
      acc += wq * e * e;
    }
  }
  return std::sqrt(acc);
}

double pressure_mean(const DofMap& dm, const Vec& p) {
  const QuadTab tab = tabulate(tri_rule_degree6());
  const Mesh& mesh = *dm.mesh;
  double acc = 0.0, area = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const TriGeom g = tri_geometry(mesh, t);
    const auto pdofs = element_pressure_dofs(dm, t);
    area += g.area;
    for (std::size_t q = 0; q < tab.w.size(); ++q) {
      double ph = 0.0;
      for (int l = 0; l < 3; ++l) ph += p[pdofs[l]] * tab.n1[q][l];
      acc += tab.w[q] * g.area * ph;
    }
  }
  return acc / area;
}

}  // namespace polyrom
