#include "polyrom/decay_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "polyrom/errors.hpp"

namespace polyrom {

namespace {

using Points = std::vector<std::pair<int, double>>;

struct PreCut {
  Points used;
  int n_cut;
};

// Sorted positive-eps prefix up to the self-convergence floor.
PreCut pre_cut(const Points& raw, double tau) {
  Points pts = raw;
  std::sort(pts.begin(), pts.end());
  if (pts.empty()) throw NumericalError("fit_decay: no points");

  const double eps_first = pts.front().second;
  int n_cut = pts.back().first + 1;
  for (const auto& [n, e] : pts)
    if (!(e > 0) || e < tau * eps_first) {
      n_cut = n;
      break;
    }

  Points used;
  for (const auto& [n, e] : pts)
    if (n < n_cut && e > 0) used.emplace_back(n, e);
  if (used.size() < 4)
    throw NumericalError(
        "fit_decay: fewer than 4 usable points before the plateau");
  return {std::move(used), n_cut};
}

DecayFit fit_subset(const Points& used, double a, int n_cut) {
  DecayFit fit;
  fit.a = a;
  fit.n_cut = n_cut;
  fit.used = used;

  const std::size_t m = used.size();
  double sx = 0, sy = 0;
  std::vector<double> xs(m), ys(m);
  for (std::size_t i = 0; i < m; ++i) {
    xs[i] = std::pow(static_cast<double>(used[i].first), a);
    ys[i] = std::log(used[i].second);
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double slope = sxx > 0 ? sxy / sxx : 0.0;
  const double intercept = my - slope * mx;
  fit.C = std::exp(intercept);
  fit.b = -slope;

  if (syy > 0) {
    double ss_res = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const double r = ys[i] - (intercept + slope * xs[i]);
      ss_res += r * r;
    }
    fit.r2 = 1.0 - ss_res / syy;
    fit.r2_defined = true;
  } else {
    fit.r2 = std::numeric_limits<double>::quiet_NaN();
    fit.r2_defined = false;
  }
  return fit;
}

// Longest contiguous run of at least min_pts points on which the decay model
// holds cleanly (R² >= r2_min with b > 0) under the given exponent. Ties go
// to the earliest start. Empty when no run qualifies.
Points model_run(const Points& used, double a, double r2_min, int min_pts) {
  const int m = static_cast<int>(used.size());
  int best_len = 0, best_lo = 0;
  for (int i = 0; i < m; ++i)
    for (int j = i + min_pts; j <= m; ++j) {
      if (j - i <= best_len) continue;
      const DecayFit f =
          fit_subset(Points(used.begin() + i, used.begin() + j), a, 0);
      if (f.b > 0 && f.r2_defined && f.r2 >= r2_min) {
        best_len = j - i;
        best_lo = i;
      }
    }
  if (best_len == 0) return {};
  return Points(used.begin() + best_lo, used.begin() + best_lo + best_len);
}

}  // namespace

DecayFit fit_decay(const Points& points, double a, double tau, double r2_min,
                   int min_pts) {
  const PreCut pc = pre_cut(points, tau);
  const Points run = model_run(pc.used, a, r2_min, min_pts);
  return fit_subset(run.empty() ? pc.used : run, a, pc.n_cut);
}

std::vector<DecayFit> compare_models(const Points& points,
                                     const std::vector<double>& exponents,
                                     double tau, double r2_min, int min_pts) {
  const PreCut pc = pre_cut(points, tau);
  Points sub = pc.used;
  if (!exponents.empty()) {
    // The run is detected once, with the first exponent, so every candidate
    // is scored on the identical subset.
    Points run = model_run(pc.used, exponents.front(), r2_min, min_pts);
    if (!run.empty()) sub = std::move(run);
  }
  std::vector<DecayFit> fits;
  fits.reserve(exponents.size());
  for (double a : exponents) fits.push_back(fit_subset(sub, a, pc.n_cut));
  std::stable_sort(fits.begin(), fits.end(),
                   [](const DecayFit& x, const DecayFit& y) {
                     if (x.r2_defined != y.r2_defined) return x.r2_defined;
                     return x.r2 > y.r2;
                   });
  return fits;
}

}  // namespace polyrom
