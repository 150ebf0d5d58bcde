#include "wg/weakops.hpp"

#include "wg/mesh.hpp"
#include "wg/quadrature.hpp"

namespace wg {

namespace {

void require_degree(int k) {
  if (k < 1)
    throw std::invalid_argument("weak operators require k >= 1");
}

} // namespace

int u_local_dim(const Mesh &mesh, int element, int k) {
  const int m = static_cast<int>(mesh.elements[element].size());
  return 2 * element_scalar_dim(k) + m * (k + 1);
}

int p_local_dim(const Mesh &mesh, int element, int k) {
  const int m = static_cast<int>(mesh.elements[element].size());
  return element_scalar_dim(k - 1) + m * (k + 1);
}

MatrixXd weak_curl_matrix(const Mesh &mesh, int element, int k) {
  require_degree(k);
  const int np = element_scalar_dim(k);
  const int ns = element_scalar_dim(k - 1);
  const int k1 = k + 1;
  const auto &sides = mesh.element_edges[element];
  const int m = static_cast<int>(sides.size());
  const int udim = 2 * np + m * k1;

  const ElementBasis ubasis(mesh, element, k);
  const ElementBasis qbasis(mesh, element, k - 1);

  MatrixXd rhs = MatrixXd::Zero(ns, udim);

  // volume term (v_0, curl q)_T with curl q = (dq/dy, -dq/dx)
  const QuadratureRule vol = element_rule(mesh, element, default_quad_degree(k));
  for (int q = 0; q < vol.size(); ++q) {
    const VectorXd phi = ubasis.eval(vol.points[q]);
    const MatrixXd gq = qbasis.grad(vol.points[q]);
    // x-component block pairs with dq/dy, y-component block with -dq/dx
    rhs.block(0, 0, ns, np).noalias() += vol.weights[q] * gq.col(1) * phi.transpose();
    rhs.block(0, np, ns, np).noalias() -= vol.weights[q] * gq.col(0) * phi.transpose();
  }

  // boundary term -<v_b x n, q>: with v_b = c(s) t_e and t_e x n = -sigma,
  // the side contribution is +sigma int_e psi q.
  for (int i = 0; i < m; ++i) {
    const int ei = sides[i];
    const double sigma = mesh.edge_orientation[element][i];
    const EdgeBasis ebasis(mesh, ei, k);
    const QuadratureRule er = edge_rule(mesh, ei, default_quad_degree(k));
    MatrixXd block = MatrixXd::Zero(ns, k1);
    for (int q = 0; q < er.size(); ++q)
      block.noalias() += er.weights[q] * qbasis.eval(er.points[q]) *
                         ebasis.eval(er.points[q]).transpose();
    rhs.block(0, 2 * np + i * k1, ns, k1) = sigma * block;
  }

  const MatrixXd g = gram_element_scalar(mesh, element, k - 1);
  return g.ldlt().solve(rhs);
}

MatrixXd weak_grad_moments(const Mesh &mesh, int element, int k) {
  require_degree(k);
  const int np = element_scalar_dim(k);
  const int ns = element_scalar_dim(k - 1);
  const int k1 = k + 1;
  const auto &sides = mesh.element_edges[element];
  const int m = static_cast<int>(sides.size());
  const int pdim = ns + m * k1;

  const ElementBasis vbasis(mesh, element, k);
  const ElementBasis sbasis(mesh, element, k - 1);

  MatrixXd rhs = MatrixXd::Zero(2 * np, pdim);

  // volume term -(q_0, div phi)_T
  const QuadratureRule vol = element_rule(mesh, element, default_quad_degree(k));
  for (int q = 0; q < vol.size(); ++q) {
    const VectorXd div = vbasis.vector_div(vol.points[q]);
    const VectorXd chi = sbasis.eval(vol.points[q]);
    rhs.block(0, 0, 2 * np, ns).noalias() -= vol.weights[q] * div * chi.transpose();
  }

  // boundary term +<q_b, phi.n>_dT
  for (int i = 0; i < m; ++i) {
    const int ei = sides[i];
    const Vec2 n = mesh.edge_normals[element][i];
    const EdgeBasis ebasis(mesh, ei, k);
    const QuadratureRule er = edge_rule(mesh, ei, default_quad_degree(k));
    MatrixXd block = MatrixXd::Zero(2 * np, k1);
    for (int q = 0; q < er.size(); ++q) {
      const MatrixXd v = vbasis.eval_vector(er.points[q]);
      const VectorXd phin = v * Eigen::Vector2d(n);
      block.noalias() += er.weights[q] * phin * ebasis.eval(er.points[q]).transpose();
    }
    rhs.block(0, ns + i * k1, 2 * np, k1) = block;
  }

  return rhs;
}

MatrixXd weak_grad_matrix(const Mesh &mesh, int element, int k) {
  const MatrixXd rhs = weak_grad_moments(mesh, element, k);
  const MatrixXd g = gram_element_scalar(mesh, element, k);
  const auto solver = g.ldlt();
  const int np = element_scalar_dim(k);
  MatrixXd w(rhs.rows(), rhs.cols());
  w.topRows(np) = solver.solve(rhs.topRows(np));
  w.bottomRows(np) = solver.solve(rhs.bottomRows(np));
  return w;
}

MatrixXd stab_matrix(const Mesh &mesh, int element, int k, double gamma) {
  require_degree(k);
  if (!(gamma > 0.0))
    throw std::invalid_argument("stab_matrix: gamma must be positive");
  const int np = element_scalar_dim(k);
  const int k1 = k + 1;
  const auto &sides = mesh.element_edges[element];
  const int m = static_cast<int>(sides.size());
  const int udim = 2 * np + m * k1;

  const ElementBasis ubasis(mesh, element, k);
  MatrixXd s = MatrixXd::Zero(udim, udim);

  for (int i = 0; i < m; ++i) {
    const int ei = sides[i];
    const double sigma = mesh.edge_orientation[element][i];
    const Vec2 n = mesh.edge_normals[element][i];
    const EdgeBasis ebasis(mesh, ei, k);
    const QuadratureRule er = edge_rule(mesh, ei, default_quad_degree(k));
    for (int q = 0; q < er.size(); ++q) {
      // jump (v_0 - v_b) x n as a linear functional of the local dofs
      VectorXd jump = VectorXd::Zero(udim);
      const VectorXd phi = ubasis.eval(er.points[q]);
      jump.head(np) = phi * n.y();
      jump.segment(np, np) = -phi * n.x();
      jump.segment(2 * np + i * k1, k1) = sigma * ebasis.eval(er.points[q]);
      s.noalias() += er.weights[q] * jump * jump.transpose();
    }
  }

  return (gamma / mesh.element_diameters[element]) * s;
}

MatrixXd p_stab_matrix(const Mesh &mesh, int element, int k) {
  require_degree(k);
  const int ns = element_scalar_dim(k - 1);
  const int k1 = k + 1;
  const auto &sides = mesh.element_edges[element];
  const int m = static_cast<int>(sides.size());
  const int pdim = ns + m * k1;

  const ElementBasis sbasis(mesh, element, k - 1);
  MatrixXd s = MatrixXd::Zero(pdim, pdim);

  for (int i = 0; i < m; ++i) {
    const int ei = sides[i];
    const EdgeBasis ebasis(mesh, ei, k);
    const QuadratureRule er = edge_rule(mesh, ei, default_quad_degree(k));
    for (int q = 0; q < er.size(); ++q) {
      VectorXd diff = VectorXd::Zero(pdim);
      diff.head(ns) = sbasis.eval(er.points[q]);
      diff.segment(ns + i * k1, k1) = -ebasis.eval(er.points[q]);
      s.noalias() += er.weights[q] * diff * diff.transpose();
    }
  }

  return mesh.element_diameters[element] * s;
}

MatrixXd vnorm_matrix(const Mesh &mesh, int element, int k, double mu_inv) {
  const int np = element_scalar_dim(k);
  const int k1 = k + 1;
  const auto &sides = mesh.element_edges[element];
  const int m = static_cast<int>(sides.size());
  const int udim = 2 * np + m * k1;

  const ElementBasis ubasis(mesh, element, k);
  MatrixXd v = MatrixXd::Zero(udim, udim);

  const QuadratureRule vol = element_rule(mesh, element, default_quad_degree(k));
  for (int q = 0; q < vol.size(); ++q) {
    VectorXd curl = VectorXd::Zero(udim);
    curl.head(2 * np) = ubasis.vector_curl(vol.points[q]);
    v.noalias() += mu_inv * vol.weights[q] * curl * curl.transpose();
  }

  v += stab_matrix(mesh, element, k, 1.0); // 1/h_T-weighted jumps
  return v;
}

LocalWGBlock build_local_block(const Mesh &mesh, int element, int k, double gamma) {
  LocalWGBlock block;
  block.element = element;
  block.k = k;
  block.n_sides = static_cast<int>(mesh.element_edges[element].size());
  block.u_dim = u_local_dim(mesh, element, k);
  block.p_dim = p_local_dim(mesh, element, k);
  block.curl_map = weak_curl_matrix(mesh, element, k);
  block.grad_moments = weak_grad_moments(mesh, element, k);
  block.gram_scalar_km1 = gram_element_scalar(mesh, element, k - 1);
  const MatrixXd gs = gram_element_scalar(mesh, element, k);
  const int np = element_scalar_dim(k);
  block.gram_vector_k = MatrixXd::Zero(2 * np, 2 * np);
  block.gram_vector_k.topLeftCorner(np, np) = gs;
  block.gram_vector_k.bottomRightCorner(np, np) = gs;
  const auto solver = gs.ldlt();
  block.grad_map.resize(2 * np, block.p_dim);
  block.grad_map.topRows(np) = solver.solve(block.grad_moments.topRows(np));
  block.grad_map.bottomRows(np) = solver.solve(block.grad_moments.bottomRows(np));
  block.stab = stab_matrix(mesh, element, k, gamma);
  block.p_stab = p_stab_matrix(mesh, element, k);
  return block;
}

VectorXd project_field_local(const Mesh &mesh, int element, int k, const VectorField &f) {
  const int np = element_scalar_dim(k);
  const int k1 = k + 1;
  const auto &sides = mesh.element_edges[element];
  const int m = static_cast<int>(sides.size());
  VectorXd dofs(2 * np + m * k1);
  dofs.head(2 * np) = project_element(mesh, element, PolySpace::element_vector(k), f).values;
  for (int i = 0; i < m; ++i)
    dofs.segment(2 * np + i * k1, k1) =
        project_edge_tangential(mesh, sides[i], k, f).values;
  return dofs;
}

} // namespace wg
