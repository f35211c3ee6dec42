#pragma once

#include <Eigen/SparseLU>
#include <memory>

#include "polyrom/eigenbasis.hpp"
#include "polyrom/pod.hpp"

namespace polyrom {

struct FlowSolution {
  Vec u;  // full velocity space (zeros on constrained dofs)
  Vec p;  // pressure; mean-zero when the whole boundary is Dirichlet
  int newton_iters = 0;    // pass index at which convergence was observed
  double residual = 0;     // final reduced-system residual (2-norm)
  int forcing_index = -1;
};

// Stationary incompressible flow on one (mesh, bcs, nu) triple. The Stokes
// saddle matrix is factored once at construction and shared by every
// snapshot solve; Newton refactors its Jacobian per step.
class NseSystem {
 public:
  NseSystem(const DofMap& dm, double nu, ViscousForm form);

  FlowSolution solve_stokes(const Vec& full_load) const;

  // Newton from the Stokes initial guess, backtracking line search with a
  // 1e-4 step floor; converged when the reduced residual norm <= tol.
  FlowSolution solve_nse(const Vec& full_load, double tol = 1e-10,
                         int max_iters = 30) const;

  const DofMap& dofmap() const { return *dm_; }
  double nu() const { return nu_; }
  ViscousForm form() const { return form_; }
  int system_size() const { return n_sys_; }

 private:
  Vec residual_vec(const Vec& x, const Vec& f_red) const;
  Vec pack(const Vec& u_red, const Vec& p) const;

  const DofMap* dm_;
  double nu_;
  ViscousForm form_;
  int n_u_ = 0, n_p_ = 0, n_sys_ = 0;
  bool mean_row_ = false;
  SparseMat A_red_;  // viscous block, reduced
  SparseMat B_red_;  // divergence, pressure x reduced velocity
  Vec mass_p_;       // integral of each P1 basis function
  SparseMat stokes_mat_;
  std::unique_ptr<Eigen::SparseLU<SparseMat>> stokes_fac_;
};

// One solve per forcing, assembled column-wise. Failed solves are skipped
// with a note in `failed`; throws only when every column fails.
SnapshotSet solve_snapshot_set(const DofMap& dm, double nu, ViscousForm form,
                               const ForcingSet& forcing, double tol = 1e-10,
                               int max_iters = 30);

}  // namespace polyrom
