#pragma once

#include <Eigen/Sparse>
#include <functional>

#include "polyrom/dof_map.hpp"

namespace polyrom {

using SparseMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

enum class ViscousForm { SymGrad, GradGrad };
enum class GramSpace { Scalar, Velocity };

// Scalar P2 operators (full, unconstrained space).
SparseMat assemble_scalar_stiffness(const DofMap& dm);
SparseMat assemble_scalar_mass(const DofMap& dm);

// Velocity-block operators on the full interleaved [P2]^2 space.
// SymGrad: 2*nu*(eps(u), eps(v));  GradGrad: nu*(grad u, grad v).
SparseMat assemble_viscous(const DofMap& dm, double nu, ViscousForm form);

// b(u, q) = -(div u, q); rows are pressure dofs, cols velocity dofs.
SparseMat assemble_divergence(const DofMap& dm);

// N(w)[ic, jd] = delta_cd * int (w . grad phi_j) phi_i, for velocity field w
// given by full-space coefficients.
SparseMat assemble_convection(const DofMap& dm, const Vec& w);

// Mp(u)[ic, jd] = int phi_j (d_d u_c) phi_i; the remaining Jacobian piece of
// u -> t(u; u, v), so d/du N(u)u = N(u) + Mp(u).
SparseMat assemble_convection_jacobian(const DofMap& dm, const Vec& u);

// Gram matrices: H1 over scalar or velocity space, L2 over pressure space.
SparseMat assemble_h1_gram(const DofMap& dm, GramSpace space,
                           bool include_mass = true);
SparseMat assemble_l2_gram_pressure(const DofMap& dm);
SparseMat assemble_l2_gram_velocity(const DofMap& dm);

// Loads.
Vec assemble_velocity_load(
    const DofMap& dm,
    const std::function<std::array<double, 2>(double, double)>& f);
// (f, v) when f = (g, 0) or (0, g) with g a scalar P2 coefficient vector:
// spreads M_s * g into the chosen velocity component.
Vec velocity_load_from_scalar(const DofMap& dm, const Vec& scalar_coeffs,
                              int component);

// Constraint application. reduce_* extract the kept rows/cols; scatter_free
// pads a reduced vector with zeros on constrained dofs.
SparseMat reduce_matrix(const SparseMat& A, const Constraints& rows,
                        const Constraints& cols);
Vec reduce_vector(const Vec& v, const Constraints& c);
Vec scatter_free(const Vec& reduced, const Constraints& c);

// Nodal interpolation onto the full spaces.
Vec interpolate_scalar(const DofMap& dm,
                       const std::function<double(double, double)>& f);
Vec interpolate_velocity(
    const DofMap& dm,
    const std::function<std::array<double, 2>(double, double)>& f);
Vec interpolate_pressure(const DofMap& dm,
                         const std::function<double(double, double)>& f);

// Error norms against a manufactured solution. grad returns the row-major
// Jacobian [du0/dx, du0/dy, du1/dx, du1/dy].
double velocity_h1_error(
    const DofMap& dm, const Vec& u,
    const std::function<std::array<double, 2>(double, double)>& value,
    const std::function<std::array<double, 4>(double, double)>& grad);
double pressure_l2_error(const DofMap& dm, const Vec& p,
                         const std::function<double(double, double)>& value);
double pressure_mean(const DofMap& dm, const Vec& p);

}  // namespace polyrom
