#include "wg/basis.hpp"

#include "wg/mesh.hpp"

#include <cmath>
#include <mutex>

namespace wg {

PolySpace PolySpace::element_scalar(int k) {
  return {SpaceKind::ElementScalar, k, element_scalar_dim(k)};
}
PolySpace PolySpace::element_vector(int k) {
  return {SpaceKind::ElementVector, k, 2 * element_scalar_dim(k)};
}
PolySpace PolySpace::edge_scalar(int k) { return {SpaceKind::EdgeScalar, k, k + 1}; }
PolySpace PolySpace::edge_vector(int k) { return {SpaceKind::EdgeVector, k, 2 * (k + 1)}; }

const std::vector<std::pair<int, int>> &monomial_powers(int degree) {
  static std::vector<std::vector<std::pair<int, int>>> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  if (degree >= static_cast<int>(cache.size()))
    cache.resize(degree + 1);
  auto &powers = cache[degree];
  if (powers.empty()) {
    for (int l = 0; l <= degree; ++l)
      for (int b = 0; b <= l; ++b)
        powers.emplace_back(l - b, b);
  }
  return powers;
}

ElementBasis::ElementBasis(const Mesh &mesh, int element, int degree)
    : center_(mesh.element_centroids[element]),
      scale_(mesh.element_diameters[element]),
      degree_(degree),
      dim_(element_scalar_dim(degree)) {}

VectorXd ElementBasis::eval(const Vec2 &x) const {
  const auto &powers = monomial_powers(degree_);
  const double xi = (x.x() - center_.x()) / scale_;
  const double eta = (x.y() - center_.y()) / scale_;
  VectorXd values(dim_);
  for (int i = 0; i < dim_; ++i)
    values[i] = std::pow(xi, powers[i].first) * std::pow(eta, powers[i].second);
  return values;
}

MatrixXd ElementBasis::grad(const Vec2 &x) const {
  const auto &powers = monomial_powers(degree_);
  const double xi = (x.x() - center_.x()) / scale_;
  const double eta = (x.y() - center_.y()) / scale_;
  MatrixXd g(dim_, 2);
  for (int i = 0; i < dim_; ++i) {
    const int a = powers[i].first, b = powers[i].second;
    g(i, 0) = (a == 0) ? 0.0 : a * std::pow(xi, a - 1) * std::pow(eta, b) / scale_;
    g(i, 1) = (b == 0) ? 0.0 : b * std::pow(xi, a) * std::pow(eta, b - 1) / scale_;
  }
  return g;
}

MatrixXd ElementBasis::eval_vector(const Vec2 &x) const {
  const VectorXd phi = eval(x);
  MatrixXd v = MatrixXd::Zero(2 * dim_, 2);
  v.col(0).head(dim_) = phi;
  v.col(1).tail(dim_) = phi;
  return v;
}

VectorXd ElementBasis::vector_curl(const Vec2 &x) const {
  const MatrixXd g = grad(x);
  VectorXd curl(2 * dim_);
  curl.head(dim_) = -g.col(1); // curl (phi, 0) = -d phi / dy
  curl.tail(dim_) = g.col(0);  // curl (0, phi) =  d phi / dx
  return curl;
}

VectorXd ElementBasis::vector_div(const Vec2 &x) const {
  const MatrixXd g = grad(x);
  VectorXd div(2 * dim_);
  div.head(dim_) = g.col(0);
  div.tail(dim_) = g.col(1);
  return div;
}

EdgeBasis::EdgeBasis(const Mesh &mesh, int edge, int degree)
    : mid_(mesh.edges[edge].midpoint),
      tangent_(mesh.edges[edge].tangent),
      half_length_(0.5 * mesh.edges[edge].length),
      degree_(degree) {}

VectorXd EdgeBasis::eval(const Vec2 &x) const {
  const double xi = (x - mid_).dot(tangent_) / half_length_;
  VectorXd values(degree_ + 1);
  double p = 1.0;
  for (int j = 0; j <= degree_; ++j) {
    values[j] = p;
    p *= xi;
  }
  return values;
}

MatrixXd gram_element_scalar(const Mesh &mesh, int element, int degree) {
  const ElementBasis basis(mesh, element, degree);
  const QuadratureRule rule = element_rule(mesh, element, default_quad_degree(degree));
  MatrixXd g = MatrixXd::Zero(basis.dim(), basis.dim());
  for (int q = 0; q < rule.size(); ++q) {
    const VectorXd phi = basis.eval(rule.points[q]);
    g.noalias() += rule.weights[q] * phi * phi.transpose();
  }
  return g;
}

MatrixXd gram_edge_scalar(const Mesh &mesh, int edge, int degree) {
  const EdgeBasis basis(mesh, edge, degree);
  const QuadratureRule rule = edge_rule(mesh, edge, default_quad_degree(degree));
  MatrixXd g = MatrixXd::Zero(basis.dim(), basis.dim());
  for (int q = 0; q < rule.size(); ++q) {
    const VectorXd psi = basis.eval(rule.points[q]);
    g.noalias() += rule.weights[q] * psi * psi.transpose();
  }
  return g;
}

MatrixXd gram(const Mesh &mesh, int entity, const PolySpace &space) {
  switch (space.kind) {
  case SpaceKind::ElementScalar:
    return gram_element_scalar(mesh, entity, space.degree);
  case SpaceKind::EdgeScalar:
    return gram_edge_scalar(mesh, entity, space.degree);
  case SpaceKind::ElementVector: {
    const MatrixXd gs = gram_element_scalar(mesh, entity, space.degree);
    MatrixXd g = MatrixXd::Zero(2 * gs.rows(), 2 * gs.cols());
    g.topLeftCorner(gs.rows(), gs.cols()) = gs;
    g.bottomRightCorner(gs.rows(), gs.cols()) = gs;
    return g;
  }
  case SpaceKind::EdgeVector: {
    const MatrixXd gs = gram_edge_scalar(mesh, entity, space.degree);
    MatrixXd g = MatrixXd::Zero(2 * gs.rows(), 2 * gs.cols());
    g.topLeftCorner(gs.rows(), gs.cols()) = gs;
    g.bottomRightCorner(gs.rows(), gs.cols()) = gs;
    return g;
  }
  }
  throw std::logic_error("gram: unknown space kind");
}

LocalCoeffs project_element(const Mesh &mesh, int element, const PolySpace &space,
                            const ScalarField &f) {
  if (space.kind != SpaceKind::ElementScalar)
    throw std::invalid_argument("project_element(scalar): space must be element-scalar");
  const ElementBasis basis(mesh, element, space.degree);
  const QuadratureRule rule = element_rule(mesh, element, default_quad_degree(space.degree));
  VectorXd moments = VectorXd::Zero(basis.dim());
  for (int q = 0; q < rule.size(); ++q)
    moments.noalias() += rule.weights[q] * f(rule.points[q]) * basis.eval(rule.points[q]);
  const MatrixXd g = gram_element_scalar(mesh, element, space.degree);
  return {space, g.ldlt().solve(moments)};
}

LocalCoeffs project_element(const Mesh &mesh, int element, const PolySpace &space,
                            const VectorField &f) {
  if (space.kind != SpaceKind::ElementVector)
    throw std::invalid_argument("project_element(vector): space must be element-vector");
  const ElementBasis basis(mesh, element, space.degree);
  const QuadratureRule rule = element_rule(mesh, element, default_quad_degree(space.degree));
  VectorXd mx = VectorXd::Zero(basis.dim());
  VectorXd my = VectorXd::Zero(basis.dim());
  for (int q = 0; q < rule.size(); ++q) {
    const Vec2 value = f(rule.points[q]);
    const VectorXd phi = basis.eval(rule.points[q]);
    mx.noalias() += rule.weights[q] * value.x() * phi;
    my.noalias() += rule.weights[q] * value.y() * phi;
  }
  const MatrixXd g = gram_element_scalar(mesh, element, space.degree);
  const auto solver = g.ldlt();
  VectorXd coeffs(2 * basis.dim());
  coeffs.head(basis.dim()) = solver.solve(mx);
  coeffs.tail(basis.dim()) = solver.solve(my);
  return {space, coeffs};
}

LocalCoeffs project_edge(const Mesh &mesh, int edge, int degree, const ScalarField &f) {
  const EdgeBasis basis(mesh, edge, degree);
  const QuadratureRule rule = edge_rule(mesh, edge, default_quad_degree(degree));
  VectorXd moments = VectorXd::Zero(basis.dim());
  for (int q = 0; q < rule.size(); ++q)
    moments.noalias() += rule.weights[q] * f(rule.points[q]) * basis.eval(rule.points[q]);
  const MatrixXd g = gram_edge_scalar(mesh, edge, degree);
  return {PolySpace::edge_scalar(degree), g.ldlt().solve(moments)};
}

LocalCoeffs project_edge_tangential(const Mesh &mesh, int edge, int degree,
                                    const VectorField &f) {
  const Vec2 t = mesh.edges[edge].tangent;
  return project_edge(mesh, edge, degree,
                      [&f, t](const Vec2 &x) { return f(x).dot(t); });
}

} // namespace wg
