#include "polyrom/stability.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <random>

#include "polyrom/eigensolve.hpp"
#include "polyrom/errors.hpp"
#include "polyrom/parallel.hpp"

namespace polyrom {

double coercivity_from_operators(const SparseMat& E2, const SparseMat& G,
                                 double tol) {
  EigStats stats;
  auto pairs = smallest_generalized_eigpairs(E2, G, 1, tol, 4321, &stats);
  return pairs[0].lambda;
}

double coercivity_constant(const DofMap& dm, double tol) {
  // Numerator is always the symmetric-gradient form 2*(eps, eps), i.e. the
  // viscous operator at unit viscosity, whatever form the flow solver runs.
  const SparseMat E2 = reduce_matrix(
      assemble_viscous(dm, 1.0, ViscousForm::SymGrad), dm.velocity,
      dm.velocity);
  const SparseMat G = reduce_matrix(assemble_h1_gram(dm, GramSpace::Velocity),
                                    dm.velocity, dm.velocity);
  return coercivity_from_operators(E2, G, tol);
}

namespace {

// One restart of the alternating maximization of |t(u; v, w)| over G-unit
// reduced triples. Each slot is linear in the form, so the constrained
// maximizer given the other two is the G-Riesz representative, normalized.
double maximize_trilinear(const DofMap& dm,
                          const Eigen::SimplicialLDLT<SparseMat>& Gfac,
                          const SparseMat& G, int max_iters,
                          std::uint64_t seed) {
  const int nred = dm.velocity.reduced_size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_unit = [&]() {
    Vec x(nred);
    for (int i = 0; i < nred; ++i) x[i] = gauss(rng);
    return Vec(x / std::sqrt(x.dot(G * x)));
  };
  Vec u = random_unit(), v = random_unit(), w = random_unit();

  double t_prev = 0.0;
  for (int iter = 0; iter < max_iters; ++iter) {
    const SparseMat Nu =
        reduce_matrix(assemble_convection(dm, scatter_free(u, dm.velocity)),
                      dm.velocity, dm.velocity);
    // w-step: functional on the test slot is N(u) v.
    Vec g = Nu * v;
    w = Gfac.solve(g);
    w /= std::sqrt(w.dot(G * w));
    // v-step: functional on the middle slot is N(u)^T w.
    g = Nu.transpose() * w;
    v = Gfac.solve(g);
    v /= std::sqrt(v.dot(G * v));
    // u-step: t(u; v, w) = w^T Mp(v) u with Mp the convection Jacobian term.
    const SparseMat Mv = reduce_matrix(
        assemble_convection_jacobian(dm, scatter_free(v, dm.velocity)),
        dm.velocity, dm.velocity);
    g = Mv.transpose() * w;
    u = Gfac.solve(g);
    const double gnorm = std::sqrt(u.dot(G * u));
    u /= gnorm;
    const double t_now = u.dot(g);  // = ||g||_{G^{-1}} >= 0
    if (iter > 0 && std::abs(t_now - t_prev) <=
                        1e-8 * std::max(std::abs(t_now), 1e-300))
      return t_now;
    t_prev = t_now;
  }
  return t_prev;
}

}  // namespace

double continuity_from_operators(const DofMap& dm, const SparseMat& G,
                                 int restarts, int max_iters,
                                 std::uint64_t seed) {
  if (restarts < 1)
    throw ConfigError("continuity_constant: restarts must be >= 1");
  Eigen::SimplicialLDLT<SparseMat> Gfac(G);
  if (Gfac.info() != Eigen::Success)
    throw NumericalError("continuity_constant: Gram factorization failed");

  std::vector<double> best(restarts, 0.0);
  parallel_for(0, static_cast<std::size_t>(restarts), [&](std::size_t r) {
    best[r] = maximize_trilinear(dm, Gfac, G, max_iters,
                                 seed + 1000003ull * (r + 1));
  });
  double out = 0.0;
  for (double b : best) out = std::max(out, b);
  return out;
}

double continuity_constant(const DofMap& dm, int restarts, int max_iters,
                           std::uint64_t seed) {
  const SparseMat G = reduce_matrix(assemble_h1_gram(dm, GramSpace::Velocity),
                                    dm.velocity, dm.velocity);
  return continuity_from_operators(dm, G, restarts, max_iters, seed);
}

ConstantsReport compute_constants(const DofMap& dm, int restarts,
                                  std::uint64_t seed) {
  ConstantsReport rep;
  rep.c_coer = coercivity_constant(dm);
  rep.c_cont = continuity_constant(dm, restarts, 200, seed);
  rep.c_cont_restarts = restarts;
  return rep;
}

double small_data_threshold(const ConstantsReport& report, double nu) {
  if (!(nu > 0)) throw ConfigError("small_data_threshold: nu must be > 0");
  return report.threshold(nu);
}

}  // namespace polyrom
