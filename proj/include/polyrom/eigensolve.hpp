#pragma once

#include <cstdint>
#include <vector>

#include "polyrom/assembly.hpp"

namespace polyrom {

struct EigenPair {
  double lambda;
  Vec vector;  // M-normalized
};

struct EigStats {
  int subspace_dim = 0;
  double worst_residual = 0;
};

// n smallest eigenpairs of K x = lambda M x, both SPD, by shift-invert
// Lanczos with zero shift: one factorization of K, Lanczos on K^{-1}M in the
// M-inner product with full reorthogonalization. Converged when
// ||K x - lambda M x|| <= tol * ||K x|| for every requested pair.
// Vectors are M-orthonormal; pairs sorted ascending in lambda.
std::vector<EigenPair> smallest_generalized_eigpairs(const SparseMat& K,
                                                     const SparseMat& M,
                                                     int n,
                                                     double tol = 1e-10,
                                                     std::uint64_t seed = 1234,
                                                     EigStats* stats = nullptr);

}  // namespace polyrom
