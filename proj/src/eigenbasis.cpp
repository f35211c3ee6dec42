#include "polyrom/eigenbasis.hpp"

#include <cmath>

#include "polyrom/errors.hpp"
#include "polyrom/parallel.hpp"

namespace polyrom {

std::vector<EigenPair> dirichlet_eigs(const DofMap& dm, int N, double tol,
                                      std::uint64_t seed) {
  const int free = dm.scalar_dirichlet.reduced_size();
  if (N < 1) throw ConfigError("dirichlet_eigs: N must be positive");
  if (N > free / 5)
    throw ConfigError("dirichlet_eigs: N = " + std::to_string(N) +
                      " exceeds 20% of the " + std::to_string(free) +
                      " free scalar dofs; refine the mesh");

  const SparseMat K = reduce_matrix(assemble_scalar_stiffness(dm),
                                    dm.scalar_dirichlet, dm.scalar_dirichlet);
  const SparseMat M = reduce_matrix(assemble_scalar_mass(dm),
                                    dm.scalar_dirichlet, dm.scalar_dirichlet);
  auto pairs = smallest_generalized_eigpairs(K, M, N, tol, seed);
  for (auto& p : pairs) p.vector = scatter_free(p.vector, dm.scalar_dirichlet);
  return pairs;
}

WstarNorm::WstarNorm(const DofMap& dm) : dm_(&dm) {
  gram_red_ = reduce_matrix(assemble_h1_gram(dm, GramSpace::Velocity),
                            dm.velocity, dm.velocity);
  fac_.compute(gram_red_);
  if (fac_.info() != Eigen::Success)
    throw NumericalError("wstar_norm: H1 Gram factorization failed");
}

double WstarNorm::operator()(const Vec& full_load) const {
  const Vec f = reduce_vector(full_load, dm_->velocity);
  const Vec x = fac_.solve(f);
  const double sq = f.dot(x);
  return sq > 0 ? std::sqrt(sq) : 0.0;
}

Vec WstarNorm::riesz(const Vec& full_load) const {
  const Vec f = reduce_vector(full_load, dm_->velocity);
  return scatter_free(fac_.solve(f), dm_->velocity);
}

double wstar_norm(const Vec& full_load, const DofMap& dm) {
  return WstarNorm(dm)(full_load);
}

ForcingSet build_forcing_set(const std::vector<EigenPair>& eigs,
                             const DofMap& dm, double threshold) {
  if (threshold <= 0)
    throw ConfigError("build_forcing_set: threshold must be positive");
  const WstarNorm wstar(dm);
  const SparseMat Ms = assemble_scalar_mass(dm);

  ForcingSet set;
  set.threshold = threshold;
  set.items.resize(eigs.size());
  parallel_for(0, eigs.size(), [&](std::size_t i) {
    const EigenPair& e = eigs[i];
    ForcingItem item;
    item.index = static_cast<int>(i);
    item.lambda = e.lambda;
    Vec load = Vec::Zero(dm.n_velocity);
    const Vec mg = Ms * e.vector;
    for (int j = 0; j < dm.n_scalar; ++j) load[2 * j] = mg[j];
    item.raw_norm = wstar(load);
    if (!(item.raw_norm > 0))
      throw NumericalError("build_forcing_set: zero dual norm for mode " +
                           std::to_string(i));
    item.scale = threshold / item.raw_norm;
    item.scalar = item.scale * e.vector;
    item.load = item.scale * load;
    item.final_norm = wstar(item.load);
    set.items[i] = std::move(item);
  });
  return set;
}

}  // namespace polyrom
