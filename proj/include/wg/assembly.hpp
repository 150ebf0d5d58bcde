// Global dof numbering with boundary elimination and assembly of the sparse
// system blocks A (curl energy + stabilizer), B (mass), C (divergence
// constraint) and S_p (multiplier stabilizer).
#pragma once

#include "wg/common.hpp"
#include "wg/mesh.hpp"
#include "wg/weakops.hpp"

#include <iosfwd>
#include <memory>
#include <vector>

namespace wg {

struct DofMap {
  int k = 1;
  int n_u = 0; // total u-dofs after boundary elimination
  int n_p = 0; // total p-dofs after boundary elimination
  int n_u_interior = 0;
  int u_block = 0; // 2*dim P_k per element
  int p_block = 0; // dim P_{k-1} per element
  int edge_block = 0; // k+1 per interior edge, both fields
  std::vector<int> u_edge_offset; // -1 for boundary edges
  std::vector<int> p_edge_offset; // -1 for boundary edges

  int u_elem_offset(int element) const { return element * u_block; }
  int p_elem_offset(int element) const { return element * p_block; }
};

/// Count and number the dofs: per-element interior vector/scalar blocks first,
/// then interior-edge blocks in edge order. Throws std::invalid_argument for
/// k < 1 (the scheme needs P_k edge traces against P_{k-1} curls).
DofMap build_dofmap(const Mesh &mesh, int k);

struct WGSystem {
  std::shared_ptr<const Mesh> mesh;
  DofMap dofmap;
  int k = 1;
  double gamma = 1.0;
  double eps_r = 1.0;
  double mu_r = 1.0;

  SparseMat A;   // n_u x n_u, mu_r^{-1} curl_w energy + tangential stabilizer
  SparseMat B;   // n_u x n_u, (eps_r u_0, v_0); zero on edge dofs
  SparseMat C;   // n_p x n_u, (eps_r u_0, grad_w q)
  SparseMat S_p; // n_p x n_p, multiplier stabilizer
};

/// Assemble all blocks. gamma is the stabilization factor gamma(h), evaluated
/// by the caller from the mesh refinement label.
WGSystem assemble(std::shared_ptr<const Mesh> mesh, int k, double gamma, double eps_r,
                  double mu_r);

/// || C u ||_2; zero exactly on the discrete divergence-free subspace.
double constraint_residual(const WGSystem &system, const VectorXd &u);

/// Global u-dof vector of the WG interpolant {Q_0 f, Q_b f}; boundary edge
/// dofs (eliminated) are dropped.
VectorXd project_field(const WGSystem &system, const VectorField &f);

/// Load vector F_i = (eps_r f, v_0-basis_i); supported only on interior dofs.
VectorXd assemble_load(const WGSystem &system, const VectorField &f);

/// Gather the local u-dof vector of one element, inserting zeros for
/// eliminated boundary-edge dofs.
VectorXd gather_local_u(const WGSystem &system, int element, const VectorXd &u);

/// Coordinate-format debug dump, one "row col value" line, sorted by (row, col).
void dump_coo(const SparseMat &matrix, std::ostream &out);

} // namespace wg
