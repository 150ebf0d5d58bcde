#include "wg/quadrature.hpp"

#include "wg/mesh.hpp"

#include <cmath>

namespace wg {

double QuadratureRule::weight_sum() const {
  double s = 0.0;
  for (double w : weights)
    s += w;
  return s;
}

namespace {

void check_degree(int degree) {
  if (degree < 0)
    throw QuadratureError("quadrature degree must be nonnegative");
  if (degree > kMaxQuadratureDegree)
    throw QuadratureError("quadrature degree " + std::to_string(degree) +
                          " above tabulated maximum " + std::to_string(kMaxQuadratureDegree));
}

} // namespace

void gauss_legendre(int npoints, std::vector<double> &nodes, std::vector<double> &weights) {
  nodes.assign(npoints, 0.0);
  weights.assign(npoints, 0.0);
  // Newton iteration on P_n with the Chebyshev-like initial guess; symmetric
  // pairs are filled from the first half.
  for (int i = 0; i < (npoints + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (npoints + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= npoints; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = npoints * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15)
        break;
    }
    // one clean-up step for the weight formula
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= npoints; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = npoints * (x * p1 - p0) / (x * x - 1.0);
    nodes[i] = -x;
    nodes[npoints - 1 - i] = x;
    weights[i] = weights[npoints - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

QuadratureRule edge_rule(const Vec2 &a, const Vec2 &b, int degree) {
  check_degree(degree);
  const int m = degree / 2 + 1; // 2m-1 >= degree
  std::vector<double> xs, ws;
  gauss_legendre(m, xs, ws);

  QuadratureRule rule;
  rule.degree = degree;
  const Vec2 mid = 0.5 * (a + b);
  const Vec2 half = 0.5 * (b - a);
  const double half_len = half.norm();
  rule.points.reserve(m);
  rule.weights.reserve(m);
  for (int i = 0; i < m; ++i) {
    rule.points.push_back(mid + xs[i] * half);
    rule.weights.push_back(ws[i] * half_len);
  }
  return rule;
}

QuadratureRule triangle_rule(const Vec2 &a, const Vec2 &b, const Vec2 &c, int degree) {
  check_degree(degree);
  // Collapsed tensor rule: p(u,v) = (1-u) a + u ((1-v) b + v c), |J| = 2 |T| u.
  // A total degree d integrand has degree <= d+1 in u (with the Jacobian)
  // and <= d in v.
  const int m = (degree + 3) / 2; // 2m-1 >= degree+1
  std::vector<double> xs, ws;
  gauss_legendre(m, xs, ws);

  const double area = 0.5 * cross2(b - a, c - a);
  QuadratureRule rule;
  rule.degree = degree;
  rule.points.reserve(m * m);
  rule.weights.reserve(m * m);
  for (int i = 0; i < m; ++i) {
    const double u = 0.5 * (xs[i] + 1.0);
    const double wu = 0.5 * ws[i];
    for (int j = 0; j < m; ++j) {
      const double v = 0.5 * (xs[j] + 1.0);
      const double wv = 0.5 * ws[j];
      rule.points.push_back((1.0 - u) * a + u * ((1.0 - v) * b + v * c));
      rule.weights.push_back(2.0 * area * u * wu * wv);
    }
  }
  return rule;
}

QuadratureRule polygon_rule(const std::vector<Vec2> &polygon, int degree) {
  check_degree(degree);
  const int m = static_cast<int>(polygon.size());
  if (m < 3)
    throw QuadratureError("polygon_rule: need at least 3 vertices");
  if (m == 3)
    return triangle_rule(polygon[0], polygon[1], polygon[2], degree);

  double area2 = 0.0;
  Vec2 csum = Vec2::Zero();
  for (int i = 0; i < m; ++i) {
    const Vec2 &p = polygon[i];
    const Vec2 &q = polygon[(i + 1) % m];
    const double cr = cross2(p, q);
    area2 += cr;
    csum += (p + q) * cr;
  }
  const Vec2 centroid = csum / (3.0 * area2);

  QuadratureRule rule;
  rule.degree = degree;
  for (int i = 0; i < m; ++i) {
    QuadratureRule tri = triangle_rule(centroid, polygon[i], polygon[(i + 1) % m], degree);
    rule.points.insert(rule.points.end(), tri.points.begin(), tri.points.end());
    rule.weights.insert(rule.weights.end(), tri.weights.begin(), tri.weights.end());
  }
  return rule;
}

QuadratureRule element_rule(const Mesh &mesh, int element, int degree) {
  const auto &cycle = mesh.elements[element];
  std::vector<Vec2> polygon(cycle.size());
  for (size_t i = 0; i < cycle.size(); ++i)
    polygon[i] = mesh.vertices[cycle[i]];
  return polygon_rule(polygon, degree);
}

QuadratureRule edge_rule(const Mesh &mesh, int edge, int degree) {
  const MeshEdge &e = mesh.edges[edge];
  return edge_rule(mesh.vertices[e.v0], mesh.vertices[e.v1], degree);
}

} // namespace wg
