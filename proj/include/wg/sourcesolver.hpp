// Mixed WG source-problem solver (curl curl u = eps_r f with the divergence
// constraint) and discrete error norms against manufactured solutions.
#pragma once

#include "wg/assembly.hpp"
#include "wg/common.hpp"

namespace wg {

struct SourceSolution {
  VectorXd u;
  VectorXd p;
  double solve_residual = 0.0; // ||K [u;p] - [F;0]|| / ||F||
};

/// Solve K [u; p] = [F; 0] with K = [A C^T; C -S_p] and
/// F_i = (eps_r f, v_0-basis_i), by sparse LU with one refinement step.
/// The -S_p row keeps the eliminated system positive definite (same
/// convention as the eigensolver pencil).
SourceSolution solve_source(const WGSystem &system, const VectorField &f);

struct ErrorNorms {
  double l2_error = 0.0; // ||u - u_0|| by element quadrature
  double v_error = 0.0;  // curl mismatch + jump terms, see error_norms()
};

/// l2_error = ||u_exact - u_0||. v_error combines the curl defect against the
/// exact curl with the energy-norm jumps of (Q_h u - u_h):
///   v_error^2 = sum_T mu_r^{-1} ||curl u_exact - curl_w u_h||_T^2
///             + sum_T h_T^{-1} ||((Q_0 u - u_0) - (Q_b u - u_b)) x n||_dT^2.
ErrorNorms error_norms(const WGSystem &system, const SourceSolution &solution,
                       const VectorField &exact_u, const ScalarField &exact_curl_u);

} // namespace wg
