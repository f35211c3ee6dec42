#pragma once

#include <vector>

namespace polyrom {

// Quadrature rule on the reference triangle {(x,y): x,y >= 0, x+y <= 1}.
// Weights sum to 1; integrals are weight * f(point) summed, times |T|.
struct QuadRule {
  struct Point {
    double x, y, w;
  };
  std::vector<Point> points;
  int degree = 0;
};

// 12-point symmetric rule, exact for polynomials of total degree <= 6.
// Every integrand assembled here (P2 * grad P2 * P2 at most) is degree 5.
const QuadRule& tri_rule_degree6();

// Collapsed-coordinate Gauss-Legendre rule of selectable exactness, used as
// the independent quadrature oracle in tests. Nodes are computed at runtime.
QuadRule tri_rule_gauss(int degree);

}  // namespace polyrom
