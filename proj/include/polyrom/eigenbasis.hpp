#pragma once

#include <Eigen/SparseCholesky>
#include <cstdint>

#include "polyrom/assembly.hpp"
#include "polyrom/eigensolve.hpp"

namespace polyrom {

// N smallest Laplace eigenpairs on the P2 scalar space with zero trace on
// the whole boundary, independent of the flow BCs. Vectors come back on the
// full scalar space (zeros on the boundary), mass-normalized.
// Guard: N <= 0.2 * (free scalar dofs), keeping the requested modes well
// inside the resolved part of the discrete spectrum.
std::vector<EigenPair> dirichlet_eigs(const DofMap& dm, int N,
                                      double tol = 1e-10,
                                      std::uint64_t seed = 20240601);

// Dual norm on the constrained velocity space: ||F||_* = sqrt(F^T G^{-1} F)
// via the Riesz representative under the reduced H1 Gram. Factors G once.
class WstarNorm {
 public:
  explicit WstarNorm(const DofMap& dm);
  double operator()(const Vec& full_load) const;
  Vec riesz(const Vec& full_load) const;  // representative, full space
  const SparseMat& gram() const { return gram_red_; }

 private:
  const DofMap* dm_;
  SparseMat gram_red_;
  Eigen::SimplicialLDLT<SparseMat> fac_;
};

// One-shot convenience (factors the Gram per call; prefer WstarNorm in loops).
double wstar_norm(const Vec& full_load, const DofMap& dm);

struct ForcingItem {
  int index = 0;     // position in the eigen list
  double lambda = 0;
  Vec scalar;        // scaled P2 coefficients of the x-component profile
  Vec load;          // scaled load vector on the full velocity space
  double raw_norm = 0, scale = 0, final_norm = 0;
};

struct ForcingSet {
  std::vector<ForcingItem> items;
  double threshold = 0;
};

// Loads for f_i = (f_i, 0) against velocity test functions, each rescaled so
// its dual norm equals `threshold` (the small-data bound).
ForcingSet build_forcing_set(const std::vector<EigenPair>& eigs,
                             const DofMap& dm, double threshold);

}  // namespace polyrom
