#pragma once

#include <cstdint>

#include "polyrom/assembly.hpp"

namespace polyrom {

struct ConstantsReport {
  double c_coer = 0;
  double c_cont = 0;
  int c_cont_restarts = 0;
  int coer_iterations = 0;
  double coer_residual = 0;
  double cont_best_delta = 0;  // last relative improvement of the best start
  bool overridden = false;     // user-supplied constants, not computed

  double threshold(double nu) const {
    return nu * nu * c_coer * c_coer / (4.0 * c_cont);
  }
};

// Smallest Rayleigh quotient of 2*(eps(v), eps(v)) over the H1 norm on the
// constrained velocity space: smallest eigenvalue of (2E) v = mu G v.
double coercivity_constant(const DofMap& dm, double tol = 1e-10);

// Best lower-bound estimate of sup |t(u; v, w)| over H1-unit triples, by
// alternating maximization (each slot is linear, so the optimal third vector
// given the others is one SPD Gram solve) from `restarts` random starts.
double continuity_constant(const DofMap& dm, int restarts = 20,
                           int max_iters = 200,
                           std::uint64_t seed = 777);

// Same algorithms on prebuilt reduced operators; the homogeneity and fixture
// tests drive these directly.
// E2: reduced 2*(eps, eps); G: reduced norm Gram.
double coercivity_from_operators(const SparseMat& E2, const SparseMat& G,
                                 double tol = 1e-10);
// trilinear: given reduced u, returns the pair of reduced matrices needed by
// the alternating scheme. Kept internal; see stability.cpp.
double continuity_from_operators(
    const DofMap& dm, const SparseMat& G, int restarts, int max_iters,
    std::uint64_t seed);

ConstantsReport compute_constants(const DofMap& dm, int restarts = 20,
                                  std::uint64_t seed = 777);

double small_data_threshold(const ConstantsReport& report, double nu);

}  // namespace polyrom
