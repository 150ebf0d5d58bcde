#include "wg/sourcesolver.hpp"

#include "wg/quadrature.hpp"

#include <Eigen/SparseLU>

#include <cmath>

namespace wg {

namespace {

SparseMat saddle_matrix(const WGSystem &sys) {
  const int nu = sys.dofmap.n_u;
  const int np = sys.dofmap.n_p;
  std::vector<Triplet> trip;
  trip.reserve(sys.A.nonZeros() + 2 * sys.C.nonZeros() + sys.S_p.nonZeros());
  for (int outer = 0; outer < sys.A.outerSize(); ++outer)
    for (SparseMat::InnerIterator it(sys.A, outer); it; ++it)
      trip.emplace_back(it.row(), it.col(), it.value());
  for (int outer = 0; outer < sys.C.outerSize(); ++outer)
    for (SparseMat::InnerIterator it(sys.C, outer); it; ++it) {
      trip.emplace_back(nu + it.row(), it.col(), it.value());
      trip.emplace_back(it.col(), nu + it.row(), it.value());
    }
  for (int outer = 0; outer < sys.S_p.outerSize(); ++outer)
    for (SparseMat::InnerIterator it(sys.S_p, outer); it; ++it)
      trip.emplace_back(nu + it.row(), nu + it.col(), -it.value());
  SparseMat m(nu + np, nu + np);
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return m;
}

} // namespace

SourceSolution solve_source(const WGSystem &system, const VectorField &f) {
  const int nu = system.dofmap.n_u;
  const int np = system.dofmap.n_p;

  const SparseMat k = saddle_matrix(system);
  VectorXd rhs = VectorXd::Zero(nu + np);
  rhs.head(nu) = assemble_load(system, f);

  Eigen::SparseLU<SparseMat> lu;
  lu.compute(k);
  if (lu.info() != Eigen::Success)
    throw SolverError("solve_source: saddle factorization failed");

  VectorXd x = lu.solve(rhs);
  x += lu.solve(rhs - k * x); // one refinement step

  SourceSolution sol;
  sol.u = x.head(nu);
  sol.p = x.tail(np);
  const double fn = rhs.norm();
  sol.solve_residual = fn > 0.0 ? (k * x - rhs).norm() / fn : (k * x).norm();
  return sol;
}

ErrorNorms error_norms(const WGSystem &system, const SourceSolution &solution,
                       const VectorField &exact_u, const ScalarField &exact_curl_u) {
  const Mesh &mesh = *system.mesh;
  const int k = system.k;
  const int np = element_scalar_dim(k);
  const int k1 = k + 1;
  const double mu_inv = 1.0 / system.mu_r;

  double l2_sq = 0.0;
  double v_sq = 0.0;

  for (int t = 0; t < mesh.n_elements(); ++t) {
    const VectorXd local = gather_local_u(system, t, solution.u);
    const ElementBasis ubasis(mesh, t, k);
    const ElementBasis cbasis(mesh, t, k - 1);

    // interior L2 error and curl defect
    const MatrixXd curl_map = weak_curl_matrix(mesh, t, k);
    const VectorXd curl_coeffs = curl_map * local;
    const QuadratureRule vol = element_rule(mesh, t, default_quad_degree(k));
    for (int q = 0; q < vol.size(); ++q) {
      const VectorXd phi = ubasis.eval(vol.points[q]);
      const Vec2 uh(phi.dot(local.head(np)), phi.dot(local.segment(np, np)));
      const Vec2 du = exact_u(vol.points[q]) - uh;
      l2_sq += vol.weights[q] * du.squaredNorm();

      const double wcurl = cbasis.eval(vol.points[q]).dot(curl_coeffs);
      const double dc = exact_curl_u(vol.points[q]) - wcurl;
      v_sq += mu_inv * vol.weights[q] * dc * dc;
    }

    // jump terms of Q_h u - u_h
    const VectorXd qh = project_field_local(mesh, t, k, exact_u);
    const auto &sides = mesh.element_edges[t];
    const double h_t = mesh.element_diameters[t];
    for (size_t i = 0; i < sides.size(); ++i) {
      const int ei = sides[i];
      const double sigma = mesh.edge_orientation[t][i];
      const Vec2 n = mesh.edge_normals[t][i];
      const EdgeBasis ebasis(mesh, ei, k);
      const QuadratureRule er = edge_rule(mesh, ei, default_quad_degree(k));

      // boundary edges carry no u_b dof: the trace is the eliminated zero
      VectorXd d0x = qh.head(np) - local.head(np);
      VectorXd d0y = qh.segment(np, np) - local.segment(np, np);
      VectorXd db = qh.segment(2 * np + i * k1, k1) - local.segment(2 * np + i * k1, k1);
      if (mesh.edges[ei].is_boundary())
        db = qh.segment(2 * np + i * k1, k1); // u_b = 0 there

      double edge_sq = 0.0;
      for (int q = 0; q < er.size(); ++q) {
        const VectorXd phi = ubasis.eval(er.points[q]);
        const Vec2 d0(phi.dot(d0x), phi.dot(d0y));
        const double jb = ebasis.eval(er.points[q]).dot(db);
        const double jump = cross_n(d0, n) + sigma * jb; // (d_0 - d_b) x n
        edge_sq += er.weights[q] * jump * jump;
      }
      v_sq += edge_sq / h_t;
    }
  }

  ErrorNorms norms;
  norms.l2_error = std::sqrt(l2_sq);
  norms.v_error = std::sqrt(v_sq);
  return norms;
}

} // namespace wg
