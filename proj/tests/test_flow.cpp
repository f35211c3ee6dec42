#include <cmath>

#include "doctest.h"
#include "polyrom/flow_solver.hpp"
#include "polyrom/stability.hpp"
#include "support.hpp"

using namespace polyrom;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Divergence-free velocity vanishing on the unit-square rim, with a
// mean-zero pressure; the classical vortex pair.
std::array<double, 2> mms_u(double x, double y) {
  const double sx = std::sin(kPi * x), sy = std::sin(kPi * y);
  return {kPi * sx * sx * std::sin(2 * kPi * y),
          -kPi * std::sin(2 * kPi * x) * sy * sy};
}

std::array<double, 4> mms_grad_u(double x, double y) {
  const double sx = std::sin(kPi * x), sy = std::sin(kPi * y);
  const double p2 = kPi * kPi;
  return {p2 * std::sin(2 * kPi * x) * std::sin(2 * kPi * y),
          2 * p2 * sx * sx * std::cos(2 * kPi * y),
          -2 * p2 * std::cos(2 * kPi * x) * sy * sy,
          -p2 * std::sin(2 * kPi * x) * std::sin(2 * kPi * y)};
}

double mms_p(double x, double y) {
  return std::cos(kPi * x) * std::sin(kPi * y);
}

// f = -nu lap(u) + grad(p); valid for either viscous form because u is
// divergence-free and the test space has zero trace.
std::array<double, 2> mms_f_stokes(double nu, double x, double y) {
  const double p3 = kPi * kPi * kPi;
  const double lap1 = 2 * p3 * std::sin(2 * kPi * y) * (2 * std::cos(2 * kPi * x) - 1);
  const double lap2 = -2 * p3 * std::sin(2 * kPi * x) * (2 * std::cos(2 * kPi * y) - 1);
  const double px = -kPi * std::sin(kPi * x) * std::sin(kPi * y);
  const double py = kPi * std::cos(kPi * x) * std::cos(kPi * y);
  return {-nu * lap1 + px, -nu * lap2 + py};
}

std::array<double, 2> mms_f_nse(double nu, double x, double y) {
  const auto f = mms_f_stokes(nu, x, y);
  const auto u = mms_u(x, y);
  const auto g = mms_grad_u(x, y);
  return {f[0] + u[0] * g[0] + u[1] * g[1], f[1] + u[0] * g[2] + u[1] * g[3]};
}

struct MmsErrors {
  double u_h1, p_l2;
};

MmsErrors solve_mms(int n, double nu, bool nonlinear, ViscousForm form) {
  const Mesh mesh = generate_rectangle(0, 0, 1, 1, n, n);
  const DofMap dm = build_dofmap(mesh, testsup::all_dirichlet(mesh));
  const NseSystem sys(dm, nu, form);
  const Vec load = assemble_velocity_load(dm, [&](double x, double y) {
    return nonlinear ? mms_f_nse(nu, x, y) : mms_f_stokes(nu, x, y);
  });
  const FlowSolution sol = nonlinear ? sys.solve_nse(load) : sys.solve_stokes(load);
  MmsErrors e;
  e.u_h1 = velocity_h1_error(dm, sol.u, mms_u, mms_grad_u);
  e.p_l2 = pressure_l2_error(dm, sol.p, mms_p);
  return e;
}

Constraints identity_constraints(int n) {
  Constraints c;
  c.full_size = n;
  c.keep.resize(n);
  c.full_to_reduced.resize(n);
  for (int i = 0; i < n; ++i) c.keep[i] = c.full_to_reduced[i] = i;
  return c;
}

// The discrete stationary residual and its analytic Jacobian over the packed
// state [u_red; p; (lambda)], built from the public operators.
struct PackedSystem {
  const DofMap& dm;
  double nu;
  SparseMat A_red, B_red;
  Vec mass_p, f_red;
  bool mean_row;
  int nu_red, np, nsys;

  PackedSystem(const DofMap& dm_, double nu_, std::uint64_t fseed)
      : dm(dm_), nu(nu_) {
    A_red = reduce_matrix(assemble_viscous(dm, nu, ViscousForm::SymGrad),
                          dm.velocity, dm.velocity);
    B_red = reduce_matrix(assemble_divergence(dm),
                          identity_constraints(dm.n_pressure), dm.velocity);
    mass_p = assemble_l2_gram_pressure(dm) * Vec::Ones(dm.n_pressure);
    mean_row = dm.mean_zero_pressure;
    nu_red = dm.velocity.reduced_size();
    np = dm.n_pressure;
    nsys = nu_red + np + (mean_row ? 1 : 0);
    f_red = testsup::random_vec(nu_red, fseed);
  }

  Vec residual(const Vec& x) const {
    const Vec u = x.head(nu_red);
    const Vec p = x.segment(nu_red, np);
    const Vec uf = scatter_free(u, dm.velocity);
    const SparseMat N =
        reduce_matrix(assemble_convection(dm, uf), dm.velocity, dm.velocity);
    Vec r(nsys);
    r.head(nu_red) = A_red * u + N * u + B_red.transpose() * p - f_red;
    r.segment(nu_red, np) = B_red * u;
    if (mean_row) {
      const double lam = x[nsys - 1];
      r.segment(nu_red, np) += lam * mass_p;
      r[nsys - 1] = mass_p.dot(p);
    }
    return r;
  }

  Eigen::MatrixXd jacobian(const Vec& x) const {
    const Vec uf = scatter_free(x.head(nu_red), dm.velocity);
    const SparseMat N =
        reduce_matrix(assemble_convection(dm, uf), dm.velocity, dm.velocity);
    const SparseMat Mp = reduce_matrix(assemble_convection_jacobian(dm, uf),
                                       dm.velocity, dm.velocity);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(nsys, nsys);
    J.topLeftCorner(nu_red, nu_red) =
        Eigen::MatrixXd(A_red) + Eigen::MatrixXd(N) + Eigen::MatrixXd(Mp);
    J.block(0, nu_red, nu_red, np) = Eigen::MatrixXd(B_red).transpose();
    J.block(nu_red, 0, np, nu_red) = Eigen::MatrixXd(B_red);
    if (mean_row) {
      J.block(nu_red, nsys - 1, np, 1) = mass_p;
      J.block(nsys - 1, nu_red, 1, np) = mass_p.transpose();
    }
    return J;
  }

  Eigen::MatrixXd fd_jacobian(const Vec& x, double h) const {
    Eigen::MatrixXd J(nsys, nsys);
    for (int j = 0; j < nsys; ++j) {
      Vec xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      J.col(j) = (residual(xp) - residual(xm)) / (2 * h);
    }
    return J;
  }
};

}  // namespace

TEST_CASE("stokes manufactured solution converges at second order") {
  const double nu = 0.7;
  const MmsErrors c = solve_mms(8, nu, false, ViscousForm::SymGrad);
  const MmsErrors f = solve_mms(16, nu, false, ViscousForm::SymGrad);
  const double order_u = std::log2(c.u_h1 / f.u_h1);
  const double order_p = std::log2(c.p_l2 / f.p_l2);
  INFO("u errors ", c.u_h1, " -> ", f.u_h1, ", order ", order_u);
  INFO("p errors ", c.p_l2, " -> ", f.p_l2, ", order ", order_p);
  CHECK(order_u >= 1.7);
  CHECK(order_p >= 1.7);
}

TEST_CASE("navier-stokes manufactured solution converges at second order") {
  const double nu = 1.0;
  const MmsErrors c = solve_mms(8, nu, true, ViscousForm::SymGrad);
  const MmsErrors f = solve_mms(16, nu, true, ViscousForm::SymGrad);
  const double order_u = std::log2(c.u_h1 / f.u_h1);
  const double order_p = std::log2(c.p_l2 / f.p_l2);
  INFO("u errors ", c.u_h1, " -> ", f.u_h1, ", order ", order_u);
  INFO("p errors ", c.p_l2, " -> ", f.p_l2, ", order ", order_p);
  CHECK(order_u >= 1.7);
  CHECK(order_p >= 1.7);
}

TEST_CASE("grad-grad viscous form converges too") {
  const MmsErrors c = solve_mms(8, 1.0, true, ViscousForm::GradGrad);
  const MmsErrors f = solve_mms(16, 1.0, true, ViscousForm::GradGrad);
  CHECK(std::log2(c.u_h1 / f.u_h1) >= 1.7);
}

TEST_CASE("zero forcing converges to the zero solution immediately") {
  const Mesh mesh = generate_rectangle(0, 0, 1, 1, 4, 4);
  const DofMap dm = build_dofmap(mesh, testsup::all_dirichlet(mesh));
  const NseSystem sys(dm, 0.9, ViscousForm::SymGrad);
  const FlowSolution sol = sys.solve_nse(Vec::Zero(dm.n_velocity));
  CHECK(sol.newton_iters == 1);
  CHECK(sol.u.lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(sol.p.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("solutions satisfy discrete incompressibility and the mean gauge") {
  const Mesh mesh = generate_rectangle(0, 0, 1, 1, 12, 12);
  const DofMap dm = build_dofmap(mesh, testsup::all_dirichlet(mesh));
  REQUIRE(dm.mean_zero_pressure);
  const NseSystem sys(dm, 1.0, ViscousForm::SymGrad);
  const Vec load = assemble_velocity_load(
      dm, [&](double x, double y) { return mms_f_nse(1.0, x, y); });
  const FlowSolution sol = sys.solve_nse(load);
  CHECK(sol.residual <= 1e-10);

  const SparseMat B = assemble_divergence(dm);
  CHECK((B * sol.u).lpNorm<Eigen::Infinity>() <= 1e-8);
  CHECK(std::abs(pressure_mean(dm, sol.p)) <= 1e-10);
}

TEST_CASE("newton jacobian matches central finite differences") {
  SUBCASE("pure dirichlet, with the mean-gauge row") {
    const Mesh mesh = generate_rectangle(0, 0, 1, 1, 3, 3);
    const DofMap dm = build_dofmap(mesh, testsup::all_dirichlet(mesh));
    const PackedSystem sys(dm, 0.8, 99);
    for (int trial = 0; trial < 3; ++trial) {
      const Vec x = testsup::random_vec(sys.nsys, 1000 + trial);
      const Eigen::MatrixXd Jan = sys.jacobian(x);
      const Eigen::MatrixXd Jfd = sys.fd_jacobian(x, 1e-4);
      CHECK((Jfd - Jan).norm() <= 1e-6 * Jan.norm());
    }
  }
  SUBCASE("mixed boundary, no gauge row") {
    const auto fx = testsup::tiny_fixture();
    const DofMap dm = build_dofmap(fx.mesh, fx.bcs);
    const PackedSystem sys(dm, 1.3, 7);
    REQUIRE(!sys.mean_row);
    const Vec x = testsup::random_vec(sys.nsys, 2265);
    CHECK((sys.fd_jacobian(x, 1e-4) - sys.jacobian(x)).norm() <=
          1e-6 * sys.jacobian(x).norm());
  }
}

TEST_CASE("scaled forcings keep every snapshot inside the a priori ball") {
  const Mesh mesh = generate_rectangle(0, 0, 1, 1, 8, 8);
  const DofMap dm = build_dofmap(mesh, testsup::all_dirichlet(mesh));
  const ConstantsReport rep = compute_constants(dm, 4, 777);
  const double nu = 1.0;

  const auto eigs = dirichlet_eigs(dm, 4);
  const ForcingSet forcing = build_forcing_set(eigs, dm, rep.threshold(nu));
  const SnapshotSet snaps =
      solve_snapshot_set(dm, nu, ViscousForm::SymGrad, forcing);
  REQUIRE(snaps.failed.empty());

  const double ball = rep.c_coer * nu / (2 * rep.c_cont);
  const SparseMat G = assemble_h1_gram(dm, GramSpace::Velocity);
  for (int j = 0; j < snaps.Mu.cols(); ++j) {
    const Vec u = snaps.Mu.col(j);
    const double nrm = std::sqrt(u.dot(G * u));
    CHECK(nrm <= ball * (1 + 1e-6));
    CHECK(nrm > 0);  // nonzero data must produce a nonzero flow
  }
}
