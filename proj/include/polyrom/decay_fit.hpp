#pragma once

#include <utility>
#include <vector>

namespace polyrom {

struct DecayFit {
  double a = 1.0 / 3.0;  // model: eps(n) = C * exp(-b * n^a)
  double C = 0;
  double b = 0;
  double r2 = 0;
  bool r2_defined = true;  // false for constant data (zero variance)
  int n_cut = 0;           // plateau cutoff; fitted points all have n < n_cut
  std::vector<std::pair<int, double>> used;  // the fitted range
};

// Least squares of log(eps) on n^a. Points are first truncated at the
// self-convergence plateau: n_cut is the first n with eps(n) < tau * eps at
// the smallest n, and only n < n_cut with eps > 0 remain. Within that prefix
// the fit takes the longest contiguous run of at least min_pts points on
// which the model holds cleanly (R² >= r2_min with b > 0, ties to the
// earliest start), so pre-asymptotic heads and super-exponential tails drop
// out of the fitted range on their own. When no run qualifies, the fit falls
// back to the whole prefix and reports its (possibly poor) R² honestly.
// Fewer than 4 positive pre-plateau points is an error.
DecayFit fit_decay(const std::vector<std::pair<int, double>>& points, double a,
                   double tau = 1e-8, double r2_min = 0.98, int min_pts = 4);

// One fit per exponent on an identical subset (the run is detected once,
// with the first exponent), ranked by R² descending; undefined R² ranks
// last.
std::vector<DecayFit> compare_models(
    const std::vector<std::pair<int, double>>& points,
    const std::vector<double>& exponents = {1.0 / 3.0, 0.5, 1.0},
    double tau = 1e-8, double r2_min = 0.98, int min_pts = 4);

}  // namespace polyrom
