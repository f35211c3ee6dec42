#include "polyrom/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace polyrom {

namespace {

void push_orbit3(QuadRule& rule, double a, double w) {
  // barycentric (1-2a, a, a) and permutations, mapped to (x,y) = (L2, L3)
  const double b = 1.0 - 2.0 * a;
  rule.points.push_back({a, a, w});
  rule.points.push_back({b, a, w});
  rule.points.push_back({a, b, w});
}

void push_orbit6(QuadRule& rule, double a, double b, double w) {
  const double c = 1.0 - a - b;
  rule.points.push_back({a, b, w});
  rule.points.push_back({b, a, w});
  rule.points.push_back({a, c, w});
  rule.points.push_back({c, a, w});
  rule.points.push_back({b, c, w});
  rule.points.push_back({c, b, w});
}

// Gauss-Legendre nodes/weights on [0,1] by Newton iteration on P_n.
void gauss_legendre01(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    // initial guess on [-1,1]
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = 0.5 * (1.0 + t);
    w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
}

}  // namespace

const QuadRule& tri_rule_degree6() {
  static const QuadRule rule = [] {
    QuadRule r;
    r.degree = 6;
    push_orbit3(r, 0.063089014491502, 0.050844906370207);
    push_orbit3(r, 0.249286745170910, 0.116786275726379);
    push_orbit6(r, 0.310352451033785, 0.636502499121399, 0.082851075618374);
    return r;
  }();
  return rule;
}

QuadRule tri_rule_gauss(int degree) {
  // Duffy map of an m x m tensor Gauss rule: x = u, y = v(1-u), extra
  // Jacobian factor (1-u). Choosing m = degree+1 keeps the mapped rule exact
  // for total degree `degree` with margin.
  const int m = degree + 1;
  std::vector<double> gx, gw;
  gauss_legendre01(m, gx, gw);
  QuadRule r;
  r.degree = degree;
  r.points.reserve(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double u = gx[i], v = gx[j];
      // factor 2 normalizes weights to sum to 1 on the reference triangle
      r.points.push_back({u, v * (1.0 - u), 2.0 * gw[i] * gw[j] * (1.0 - u)});
    }
  }
  return r;
}

}  // namespace polyrom
