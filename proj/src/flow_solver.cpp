#include "polyrom/flow_solver.hpp"

#include <cmath>
#include <sstream>

#include "polyrom/errors.hpp"
#include "polyrom/parallel.hpp"

namespace polyrom {

namespace {

// Integral of each P1 basis function (row enforcing a mean-zero pressure).
Vec pressure_integrals(const DofMap& dm) {
  Vec m = Vec::Zero(dm.n_pressure);
  for (int t = 0; t < static_cast<int>(dm.mesh->triangles.size()); ++t) {
    const double third = dm.mesh->triangle_area(t) / 3.0;
    for (int v : dm.mesh->triangles[t]) m[v] += third;
  }
  return m;
}

}  // namespace

NseSystem::NseSystem(const DofMap& dm, double nu, ViscousForm form)
    : dm_(&dm), nu_(nu), form_(form) {
  if (!(nu > 0)) throw ConfigError("flow solver: nu must be positive");
  A_red_ = reduce_matrix(assemble_viscous(dm, nu, form), dm.velocity,
                         dm.velocity);
  // Divergence rows live on the full pressure space; only velocity columns
  // are constrained.
  Constraints all_p;
  all_p.full_size = dm.n_pressure;
  all_p.keep.resize(dm.n_pressure);
  all_p.full_to_reduced.resize(dm.n_pressure);
  for (int i = 0; i < dm.n_pressure; ++i) {
    all_p.keep[i] = i;
    all_p.full_to_reduced[i] = i;
  }
  B_red_ = reduce_matrix(assemble_divergence(dm), all_p, dm.velocity);

  n_u_ = dm.velocity.reduced_size();
  n_p_ = dm.n_pressure;
  mean_row_ = dm.mean_zero_pressure;
  n_sys_ = n_u_ + n_p_ + (mean_row_ ? 1 : 0);
  mass_p_ = pressure_integrals(dm);

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(A_red_.nonZeros() + 2 * B_red_.nonZeros() + 2 * n_p_);
  for (int k = 0; k < A_red_.outerSize(); ++k)
    for (SparseMat::InnerIterator it(A_red_, k); it; ++it)
      trips.emplace_back(static_cast<int>(it.row()),
                         static_cast<int>(it.col()), it.value());
  for (int k = 0; k < B_red_.outerSize(); ++k)
    for (SparseMat::InnerIterator it(B_red_, k); it; ++it) {
      const int q = static_cast<int>(it.row());
      const int j = static_cast<int>(it.col());
      trips.emplace_back(n_u_ + q, j, it.value());
      trips.emplace_back(j, n_u_ + q, it.value());
    }
  if (mean_row_)
    for (int q = 0; q < n_p_; ++q) {
      trips.emplace_back(n_u_ + n_p_, n_u_ + q, mass_p_[q]);
      trips.emplace_back(n_u_ + q, n_u_ + n_p_, mass_p_[q]);
    }
  stokes_mat_.resize(n_sys_, n_sys_);
  stokes_mat_.setFromTriplets(trips.begin(), trips.end());

  stokes_fac_ = std::make_unique<Eigen::SparseLU<SparseMat>>();
  stokes_fac_->compute(stokes_mat_);
  if (stokes_fac_->info() != Eigen::Success)
    throw NumericalError(
        "flow solver: singular Stokes saddle system (no Dirichlet dofs?)");
}

Vec NseSystem::pack(const Vec& u_red, const Vec& p) const {
  Vec x = Vec::Zero(n_sys_);
  x.head(n_u_) = u_red;
  x.segment(n_u_, n_p_) = p;
  return x;
}

FlowSolution NseSystem::solve_stokes(const Vec& full_load) const {
  Vec rhs = Vec::Zero(n_sys_);
  rhs.head(n_u_) = reduce_vector(full_load, dm_->velocity);
  const Vec x = stokes_fac_->solve(rhs);
  const double rn = (stokes_mat_ * x - rhs).norm();
  const double scale = std::max(rhs.norm(), 1e-300);
  if (rn > 1e-8 * scale)
    throw NumericalError("stokes solve: algebraic residual " +
                         std::to_string(rn / scale));
  FlowSolution sol;
  sol.u = scatter_free(x.head(n_u_), dm_->velocity);
  sol.p = x.segment(n_u_, n_p_);
  sol.newton_iters = 0;
  sol.residual = rn;
  return sol;
}

Vec NseSystem::residual_vec(const Vec& x, const Vec& f_red) const {
  const Vec u_red = x.head(n_u_);
  const Vec u_full = scatter_free(u_red, dm_->velocity);
  const SparseMat N_red = reduce_matrix(assemble_convection(*dm_, u_full),
                                        dm_->velocity, dm_->velocity);
  Vec r = Vec::Zero(n_sys_);
  r.head(n_u_) = A_red_ * u_red + N_red * u_red +
                 B_red_.transpose() * x.segment(n_u_, n_p_) - f_red;
  r.segment(n_u_, n_p_) = B_red_ * u_red;
  if (mean_row_) {
    const double lambda = x[n_sys_ - 1];
    r.segment(n_u_, n_p_) += lambda * mass_p_;
    r[n_sys_ - 1] = mass_p_.dot(x.segment(n_u_, n_p_));
  }
  return r;
}

FlowSolution NseSystem::solve_nse(const Vec& full_load, double tol,
                                  int max_iters) const {
  const Vec f_red = reduce_vector(full_load, dm_->velocity);
  const FlowSolution stokes = solve_stokes(full_load);
  Vec x = pack(reduce_vector(stokes.u, dm_->velocity), stokes.p);

  Vec r = residual_vec(x, f_red);
  std::vector<double> history;
  for (int iter = 1; iter <= max_iters; ++iter) {
    const double rn = r.norm();
    history.push_back(rn);
    if (rn <= tol) {
      FlowSolution sol;
      sol.u = scatter_free(x.head(n_u_), dm_->velocity);
      sol.p = x.segment(n_u_, n_p_);
      sol.newton_iters = iter;
      sol.residual = rn;
      return sol;
    }

    // Jacobian: viscous + convection + its transport term, same saddle frame.
    const Vec u_full = scatter_free(x.head(n_u_), dm_->velocity);
    const SparseMat J_conv =
        reduce_matrix(assemble_convection(*dm_, u_full) +
                          assemble_convection_jacobian(*dm_, u_full),
                      dm_->velocity, dm_->velocity);
    SparseMat J = stokes_mat_;
    // Top-left block update: add reduced convection terms.
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(stokes_mat_.nonZeros() + J_conv.nonZeros());
    for (int k = 0; k < stokes_mat_.outerSize(); ++k)
      for (SparseMat::InnerIterator it(stokes_mat_, k); it; ++it)
        trips.emplace_back(static_cast<int>(it.row()),
                           static_cast<int>(it.col()), it.value());
    for (int k = 0; k < J_conv.outerSize(); ++k)
      for (SparseMat::InnerIterator it(J_conv, k); it; ++it)
        trips.emplace_back(static_cast<int>(it.row()),
                           static_cast<int>(it.col()), it.value());
    J.setFromTriplets(trips.begin(), trips.end());

    Eigen::SparseLU<SparseMat> fac(J);
    if (fac.info() != Eigen::Success)
      throw NumericalError("newton: singular Jacobian at iteration " +
                           std::to_string(iter));
    const Vec delta = fac.solve(-r);

    double s = 1.0;
    Vec x_try, r_try;
    while (true) {
      x_try = x + s * delta;
      r_try = residual_vec(x_try, f_red);
      if (r_try.norm() < rn) break;
      s *= 0.5;
      if (s < 1e-4) {
        std::ostringstream msg;
        msg << "newton: line search stagnated at iteration " << iter
            << ", residual " << rn;
        throw NumericalError(msg.str());
      }
    }
    x = std::move(x_try);
    r = std::move(r_try);
  }

  std::ostringstream msg;
  msg << "newton: no convergence in " << max_iters << " iterations; residuals";
  for (double h : history) msg << " " << h;
  throw NumericalError(msg.str());
}

SnapshotSet solve_snapshot_set(const DofMap& dm, double nu, ViscousForm form,
                               const ForcingSet& forcing, double tol,
                               int max_iters) {
  if (forcing.items.empty())
    throw ConfigError("solve_snapshot_set: empty forcing set");
  const NseSystem sys(dm, nu, form);

  const std::size_t N = forcing.items.size();
  std::vector<FlowSolution> sols(N);
  std::vector<char> ok(N, 0);
  parallel_for(0, N, [&](std::size_t i) {
    try {
      FlowSolution s = sys.solve_nse(forcing.items[i].load, tol, max_iters);
      s.forcing_index = forcing.items[i].index;
      sols[i] = std::move(s);
      ok[i] = 1;
    } catch (const NumericalError&) {
      ok[i] = 0;
    }
  });

  SnapshotSet set;
  int n_ok = 0;
  for (std::size_t i = 0; i < N; ++i) n_ok += ok[i];
  if (n_ok == 0)
    throw NumericalError("solve_snapshot_set: every solve failed");
  set.Mu.resize(dm.n_velocity, n_ok);
  set.Mp.resize(dm.n_pressure, n_ok);
  int col = 0;
  for (std::size_t i = 0; i < N; ++i) {
    if (!ok[i]) {
      set.failed.push_back(forcing.items[i].index);
      continue;
    }
    set.Mu.col(col) = sols[i].u;
    set.Mp.col(col) = sols[i].p;
    set.forcing_index.push_back(sols[i].forcing_index);
    set.newton_iters.push_back(sols[i].newton_iters);
    set.residuals.push_back(sols[i].residual);
    ++col;
  }
  set.Gu = assemble_h1_gram(dm, GramSpace::Velocity);
  set.Gp = assemble_l2_gram_pressure(dm);
  return set;
}

}  // namespace polyrom
