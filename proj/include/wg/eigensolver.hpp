// Solver for the constrained generalized eigenproblem
//   A u + C^T p = lambda B u,
//   C u - S_p p = 0,
// posed as the symmetric pencil M = [[A, C^T], [C, -S_p]] against
// N = [[B, 0], [0, 0]]; eliminating p turns the constraint into the additive
// penalty C^T S_p^{-1} C, which keeps spurious (non-divergence-free) modes
// above the physical spectrum. Small systems are solved densely by static
// condensation onto the interior block; large ones by shift-invert Lanczos
// in the B-semi-inner product with full reorthogonalization and locking.
#pragma once

#include "wg/assembly.hpp"
#include "wg/common.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace wg {

struct SolverConfig {
  int num_eigs = 5;
  double shift = 0.3;      // spectral target; perturbed by +0.01 on factorization failure
  double tol_res = 1e-8;   // certificate ||A u + C^T p - lambda B u||
  double tol_zero = 1e-8;  // pairs with lambda <= tol_zero are nonphysical
  int max_subspace = 0;    // 0 -> max(40, 4 * num_eigs)
  std::uint32_t seed = 20240501;
  int dense_threshold = 3000; // total dofs at or below which the dense path runs
  int max_restarts = 60;

  int subspace() const { return max_subspace > 0 ? max_subspace : std::max(40, 4 * num_eigs); }
};

struct EigenResult {
  VectorXd eigenvalues;    // accepted, ascending
  MatrixXd eigenvectors;   // n_u x count, b_w-normalized, mutually B-orthogonal
  MatrixXd multipliers;    // n_p x count
  VectorXd residual_norms;   // ||A u + C^T p - lambda B u||_2, recomputed
  VectorXd constraint_norms; // ||C u - S_p p||_2 (the solved constraint row)
  struct Rejected {
    double lambda;
    std::string reason;
  };
  std::vector<Rejected> rejected;
  bool complete = true; // false when fewer than num_eigs pairs were accepted
  bool used_dense_path = false;

  int count() const { return static_cast<int>(eigenvalues.size()); }
};

/// Solve for the num_eigs smallest physical eigenvalues.
EigenResult solve(const WGSystem &system, const SolverConfig &config);

/// Classify raw pairs: reject lambda <= tol_zero, vanishing B-norm
/// ("multiplier mode"), residual failures and B-parallel duplicates;
/// b_w-normalize the survivors and sort ascending.
EigenResult filter(const WGSystem &system, const VectorXd &lambdas, const MatrixXd &u_vecs,
                   const MatrixXd &p_vecs, const SolverConfig &config);

/// Broken energy norm of a u-dof vector:
/// sqrt(sum_T mu_r^{-1} ||curl v_0||_T^2 + h_T^{-1} ||(v_0-v_b) x n||_dT^2).
double vnorm(const WGSystem &system, const VectorXd &u);

/// Global matrix of the squared broken energy norm (test/diagnostic use).
SparseMat assemble_vnorm_matrix(const WGSystem &system);

} // namespace wg
