// Element-local weak operators: weak curl and weak gradient moment maps,
// the tangential-jump stabilizer, and the scalar multiplier stabilizer.
//
// Local dof layouts (element with m sides, degree k, Np = dim P_k(T),
// Ns = dim P_{k-1}(T), K1 = k+1):
//   u-dofs: [2*Np interior vector coeffs | side 0: K1 tangential edge coeffs |
//            ... | side m-1: K1 coeffs]
//   p-dofs: [Ns interior scalar coeffs | side 0: K1 edge coeffs | ...]
// Edge coefficients are expressed in the canonical edge frame (tangent from
// the lower to the higher vertex index), so the two elements sharing an edge
// see identical dof values.
#pragma once

#include "wg/basis.hpp"
#include "wg/common.hpp"

namespace wg {

struct Mesh;

int u_local_dim(const Mesh &mesh, int element, int k);
int p_local_dim(const Mesh &mesh, int element, int k);

/// Map from local u-dofs to the coefficients of the weak curl in P_{k-1}(T).
/// The returned W satisfies, for every q in P_{k-1}(T),
///   (curl_w v, q)_T = (v_0, curl q)_T - <v_b x n, q>_dT,
/// i.e. G_{k-1} W = moment matrix of the right-hand side.
MatrixXd weak_curl_matrix(const Mesh &mesh, int element, int k);

/// Map from local p-dofs to the coefficients of the weak gradient in
/// [P_k(T)]^2, defined by (grad_w q, phi)_T = -(q_0, div phi)_T + <q_b, phi.n>_dT.
MatrixXd weak_grad_matrix(const Mesh &mesh, int element, int k);

/// Moment matrix (vector-basis rows x p-dofs) of the weak gradient right-hand
/// side; equals G_k^vec * weak_grad_matrix. The divergence-constraint block
/// couples interior u-dofs through this matrix without a Gram solve.
MatrixXd weak_grad_moments(const Mesh &mesh, int element, int k);

/// Tangential jump form gamma/h_T * sum_e int_e ((u_0-u_b) x n)((v_0-v_b) x n).
MatrixXd stab_matrix(const Mesh &mesh, int element, int k, double gamma);

/// Multiplier jump form h_T * sum_e int_e (p_0-p_b)(q_0-q_b).
MatrixXd p_stab_matrix(const Mesh &mesh, int element, int k);

/// Quadratic form of the broken energy norm on local u-dofs:
/// mu_inv * |curl v_0|_T^2 + 1/h_T * sum_e |(v_0-v_b) x n|_e^2
/// (strong curl of the interior part; no gamma weight).
MatrixXd vnorm_matrix(const Mesh &mesh, int element, int k, double mu_inv);

struct LocalWGBlock {
  int element = -1;
  int k = 1;
  int n_sides = 0;
  int u_dim = 0;
  int p_dim = 0;
  MatrixXd curl_map;      // dim P_{k-1} x u_dim
  MatrixXd grad_map;      // 2*dim P_k x p_dim
  MatrixXd grad_moments;  // 2*dim P_k x p_dim
  MatrixXd stab;          // u_dim x u_dim (includes gamma/h_T)
  MatrixXd p_stab;        // p_dim x p_dim (includes h_T)
  MatrixXd gram_scalar_km1;
  MatrixXd gram_vector_k; // block-diagonal scalar Gram
};

LocalWGBlock build_local_block(const Mesh &mesh, int element, int k, double gamma);

/// Interior + per-side tangential coefficients of the WG interpolant
/// {Q_0 f, Q_b f} of a vector field, in the local u-dof layout.
VectorXd project_field_local(const Mesh &mesh, int element, int k, const VectorField &f);

} // namespace wg
