// Quadrature: Gauss-Legendre edge rules, Duffy-type tensor rules on
// triangles, and centroid-fan rules on convex polygons.
#pragma once

#include "wg/common.hpp"

#include <vector>

namespace wg {

struct Mesh;

/// Highest exactness degree the rule factory serves.
constexpr int kMaxQuadratureDegree = 20;

struct QuadratureRule {
  int degree = 0; // declared polynomial exactness
  std::vector<Vec2> points;
  std::vector<double> weights;

  int size() const { return static_cast<int>(points.size()); }
  double weight_sum() const;

  template <typename F> double integrate(F &&f) const {
    double s = 0.0;
    for (int q = 0; q < size(); ++q)
      s += weights[q] * f(points[q]);
    return s;
  }
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int npoints, std::vector<double> &nodes, std::vector<double> &weights);

/// Rule on the segment [a, b], exact for polynomials of the given degree.
QuadratureRule edge_rule(const Vec2 &a, const Vec2 &b, int degree);

/// Rule on the triangle (a, b, c), exact for the given total degree.
QuadratureRule triangle_rule(const Vec2 &a, const Vec2 &b, const Vec2 &c, int degree);

/// Rule on a convex ccw polygon, fan-triangulated from its centroid.
QuadratureRule polygon_rule(const std::vector<Vec2> &polygon, int degree);

/// Rules bound to mesh entities.
QuadratureRule element_rule(const Mesh &mesh, int element, int degree);
QuadratureRule edge_rule(const Mesh &mesh, int edge, int degree);

} // namespace wg
