// Polynomial spaces on elements and edges: scaled monomial bases centered at
// centroids, Gram matrices, and local L2 projections.
#pragma once

#include "wg/common.hpp"
#include "wg/quadrature.hpp"

#include <vector>

namespace wg {

struct Mesh;

enum class SpaceKind { ElementScalar, ElementVector, EdgeScalar, EdgeVector };

struct PolySpace {
  SpaceKind kind = SpaceKind::ElementScalar;
  int degree = 0;
  int dimension = 0;

  static PolySpace element_scalar(int k);
  static PolySpace element_vector(int k);
  static PolySpace edge_scalar(int k);
  static PolySpace edge_vector(int k);
};

/// dim P_k on a 2D element: (k+1)(k+2)/2.
inline int element_scalar_dim(int k) { return (k + 1) * (k + 2) / 2; }
/// dim P_k on an edge: k+1.
inline int edge_scalar_dim(int k) { return k + 1; }

struct LocalCoeffs {
  PolySpace space;
  VectorXd values;
};

/// Monomial exponent pairs of P_k, graded order: (0,0), (1,0), (0,1), (2,0), ...
const std::vector<std::pair<int, int>> &monomial_powers(int degree);

/// Scalar monomial basis ((x-c)/h)^a ((y-c)/h)^b on an element, centered at
/// the centroid and scaled by the element diameter.
class ElementBasis {
public:
  ElementBasis(const Mesh &mesh, int element, int degree);

  int degree() const { return degree_; }
  int dim() const { return dim_; }
  const Vec2 &center() const { return center_; }
  double scale() const { return scale_; }

  VectorXd eval(const Vec2 &x) const;
  /// dim x 2 matrix of gradients.
  MatrixXd grad(const Vec2 &x) const;

  /// Values of the 2*dim component-wise vector basis [(phi_i,0); (0,phi_i)].
  /// Returns a 2*dim x 2 matrix whose row j is the vector value of basis j.
  MatrixXd eval_vector(const Vec2 &x) const;
  /// Curl of the vector basis: row j gives d/dx v2 - d/dy v1 of basis j.
  VectorXd vector_curl(const Vec2 &x) const;
  /// Divergence of the vector basis.
  VectorXd vector_div(const Vec2 &x) const;

private:
  Vec2 center_;
  double scale_;
  int degree_;
  int dim_;
};

/// Monomial basis xi^j on an edge, xi in [-1,1] along the canonical tangent.
class EdgeBasis {
public:
  EdgeBasis(const Mesh &mesh, int edge, int degree);

  int degree() const { return degree_; }
  int dim() const { return degree_ + 1; }

  VectorXd eval(const Vec2 &x) const;

private:
  Vec2 mid_;
  Vec2 tangent_;
  double half_length_;
  int degree_;
};

/// Default quadrature exactness used for all pairings at polynomial degree k.
inline int default_quad_degree(int k) { return 2 * k + 4; }

/// Gram matrix of the scalar element basis (vector spaces are block-diagonal
/// copies, see gram()).
MatrixXd gram_element_scalar(const Mesh &mesh, int element, int degree);
MatrixXd gram_edge_scalar(const Mesh &mesh, int edge, int degree);

/// Gram matrix of any space kind on the given entity (element index for
/// element kinds, edge index for edge kinds).
MatrixXd gram(const Mesh &mesh, int entity, const PolySpace &space);

/// L2 projection onto a scalar or vector element space.
LocalCoeffs project_element(const Mesh &mesh, int element, const PolySpace &space,
                            const ScalarField &f);
LocalCoeffs project_element(const Mesh &mesh, int element, const PolySpace &space,
                            const VectorField &f);

/// L2 projection onto P_degree(e), scalar data.
LocalCoeffs project_edge(const Mesh &mesh, int edge, int degree, const ScalarField &f);
/// Projection of the tangential trace f . t_e onto P_degree(e).
LocalCoeffs project_edge_tangential(const Mesh &mesh, int edge, int degree,
                                    const VectorField &f);

} // namespace wg
