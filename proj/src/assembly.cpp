#include "wg/assembly.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <tuple>

namespace wg {

DofMap build_dofmap(const Mesh &mesh, int k) {
  if (k < 1)
    throw std::invalid_argument("build_dofmap: scheme requires k >= 1");

  DofMap dm;
  dm.k = k;
  dm.u_block = 2 * element_scalar_dim(k);
  dm.p_block = element_scalar_dim(k - 1);
  dm.edge_block = k + 1;
  dm.n_u_interior = mesh.n_elements() * dm.u_block;

  dm.u_edge_offset.assign(mesh.n_edges(), -1);
  dm.p_edge_offset.assign(mesh.n_edges(), -1);
  int u_next = dm.n_u_interior;
  int p_next = mesh.n_elements() * dm.p_block;
  for (int e = 0; e < mesh.n_edges(); ++e) {
    if (mesh.edges[e].is_boundary())
      continue; // v_b x n = 0 and p_b = 0 on the boundary
    dm.u_edge_offset[e] = u_next;
    dm.p_edge_offset[e] = p_next;
    u_next += dm.edge_block;
    p_next += dm.edge_block;
  }
  dm.n_u = u_next;
  dm.n_p = p_next;
  return dm;
}

namespace {

// Local-to-global index tables; -1 marks eliminated boundary dofs.
std::vector<int> u_global_indices(const Mesh &mesh, const DofMap &dm, int element) {
  const auto &sides = mesh.element_edges[element];
  std::vector<int> idx(dm.u_block + sides.size() * dm.edge_block, -1);
  const int base = dm.u_elem_offset(element);
  for (int j = 0; j < dm.u_block; ++j)
    idx[j] = base + j;
  for (size_t i = 0; i < sides.size(); ++i) {
    const int off = dm.u_edge_offset[sides[i]];
    if (off < 0)
      continue;
    for (int l = 0; l < dm.edge_block; ++l)
      idx[dm.u_block + i * dm.edge_block + l] = off + l;
  }
  return idx;
}

std::vector<int> p_global_indices(const Mesh &mesh, const DofMap &dm, int element) {
  const auto &sides = mesh.element_edges[element];
  std::vector<int> idx(dm.p_block + sides.size() * dm.edge_block, -1);
  const int base = dm.p_elem_offset(element);
  for (int j = 0; j < dm.p_block; ++j)
    idx[j] = base + j;
  for (size_t i = 0; i < sides.size(); ++i) {
    const int off = dm.p_edge_offset[sides[i]];
    if (off < 0)
      continue;
    for (int l = 0; l < dm.edge_block; ++l)
      idx[dm.p_block + i * dm.edge_block + l] = off + l;
  }
  return idx;
}

void scatter(std::vector<Triplet> &triplets, const MatrixXd &local,
             const std::vector<int> &rows, const std::vector<int> &cols) {
  for (int i = 0; i < local.rows(); ++i) {
    if (rows[i] < 0)
      continue;
    for (int j = 0; j < local.cols(); ++j) {
      if (cols[j] < 0)
        continue;
      const double v = local(i, j);
      if (v != 0.0)
        triplets.emplace_back(rows[i], cols[j], v);
    }
  }
}

} // namespace

WGSystem assemble(std::shared_ptr<const Mesh> mesh, int k, double gamma, double eps_r,
                  double mu_r) {
  if (!mesh)
    throw std::invalid_argument("assemble: null mesh");
  if (!(gamma > 0.0) || !(eps_r > 0.0) || !(mu_r > 0.0))
    throw std::invalid_argument("assemble: gamma, eps_r, mu_r must be positive");

  WGSystem sys;
  sys.mesh = std::move(mesh);
  sys.dofmap = build_dofmap(*sys.mesh, k);
  sys.k = k;
  sys.gamma = gamma;
  sys.eps_r = eps_r;
  sys.mu_r = mu_r;

  const Mesh &m = *sys.mesh;
  const double mu_inv = 1.0 / mu_r;

  std::vector<Triplet> ta, tb, tc, tsp;
  for (int t = 0; t < m.n_elements(); ++t) {
    const LocalWGBlock block = build_local_block(m, t, k, gamma);
    const std::vector<int> ui = u_global_indices(m, sys.dofmap, t);
    const std::vector<int> pi = p_global_indices(m, sys.dofmap, t);

    const MatrixXd a_loc =
        mu_inv * block.curl_map.transpose() * block.gram_scalar_km1 * block.curl_map +
        block.stab;
    scatter(ta, a_loc, ui, ui);

    MatrixXd b_loc = MatrixXd::Zero(block.u_dim, block.u_dim);
    b_loc.topLeftCorner(2 * element_scalar_dim(k), 2 * element_scalar_dim(k)) =
        eps_r * block.gram_vector_k;
    scatter(tb, b_loc, ui, ui);

    // C(q, v) = (eps_r v_0, grad_w q) couples only interior u-dofs
    MatrixXd c_loc = MatrixXd::Zero(block.p_dim, block.u_dim);
    c_loc.leftCols(2 * element_scalar_dim(k)) = eps_r * block.grad_moments.transpose();
    scatter(tc, c_loc, pi, ui);

    scatter(tsp, block.p_stab, pi, pi);
  }

  sys.A.resize(sys.dofmap.n_u, sys.dofmap.n_u);
  sys.B.resize(sys.dofmap.n_u, sys.dofmap.n_u);
  sys.C.resize(sys.dofmap.n_p, sys.dofmap.n_u);
  sys.S_p.resize(sys.dofmap.n_p, sys.dofmap.n_p);
  sys.A.setFromTriplets(ta.begin(), ta.end());
  sys.B.setFromTriplets(tb.begin(), tb.end());
  sys.C.setFromTriplets(tc.begin(), tc.end());
  sys.S_p.setFromTriplets(tsp.begin(), tsp.end());
  sys.A.makeCompressed();
  sys.B.makeCompressed();
  sys.C.makeCompressed();
  sys.S_p.makeCompressed();
  return sys;
}

double constraint_residual(const WGSystem &system, const VectorXd &u) {
  if (u.size() != system.dofmap.n_u)
    throw std::invalid_argument("constraint_residual: dimension mismatch");
  return (system.C * u).norm();
}

VectorXd project_field(const WGSystem &system, const VectorField &f) {
  const Mesh &m = *system.mesh;
  const DofMap &dm = system.dofmap;
  VectorXd u = VectorXd::Zero(dm.n_u);
  for (int t = 0; t < m.n_elements(); ++t)
    u.segment(dm.u_elem_offset(t), dm.u_block) =
        project_element(m, t, PolySpace::element_vector(system.k), f).values;
  for (int e = 0; e < m.n_edges(); ++e) {
    if (dm.u_edge_offset[e] < 0)
      continue;
    u.segment(dm.u_edge_offset[e], dm.edge_block) =
        project_edge_tangential(m, e, system.k, f).values;
  }
  return u;
}

VectorXd assemble_load(const WGSystem &system, const VectorField &f) {
  const Mesh &m = *system.mesh;
  const DofMap &dm = system.dofmap;
  const int np = element_scalar_dim(system.k);
  VectorXd load = VectorXd::Zero(dm.n_u);
  for (int t = 0; t < m.n_elements(); ++t) {
    const ElementBasis basis(m, t, system.k);
    const QuadratureRule rule = element_rule(m, t, default_quad_degree(system.k));
    VectorXd fx = VectorXd::Zero(np), fy = VectorXd::Zero(np);
    for (int q = 0; q < rule.size(); ++q) {
      const Vec2 v = f(rule.points[q]);
      const VectorXd phi = basis.eval(rule.points[q]);
      fx.noalias() += rule.weights[q] * v.x() * phi;
      fy.noalias() += rule.weights[q] * v.y() * phi;
    }
    load.segment(dm.u_elem_offset(t), np) = system.eps_r * fx;
    load.segment(dm.u_elem_offset(t) + np, np) = system.eps_r * fy;
  }
  return load;
}

VectorXd gather_local_u(const WGSystem &system, int element, const VectorXd &u) {
  const Mesh &m = *system.mesh;
  const DofMap &dm = system.dofmap;
  const auto &sides = m.element_edges[element];
  VectorXd local = VectorXd::Zero(dm.u_block + sides.size() * dm.edge_block);
  local.head(dm.u_block) = u.segment(dm.u_elem_offset(element), dm.u_block);
  for (size_t i = 0; i < sides.size(); ++i) {
    const int off = dm.u_edge_offset[sides[i]];
    if (off >= 0)
      local.segment(dm.u_block + i * dm.edge_block, dm.edge_block) =
          u.segment(off, dm.edge_block);
  }
  return local;
}

void dump_coo(const SparseMat &matrix, std::ostream &out) {
  SparseMat m = matrix;
  m.makeCompressed();
  char buf[64];
  // Collect and sort explicitly; matrices are small when dumped.
  std::vector<std::tuple<int, int, double>> entries;
  entries.reserve(m.nonZeros());
  for (int outer = 0; outer < m.outerSize(); ++outer)
    for (SparseMat::InnerIterator it(m, outer); it; ++it)
      entries.emplace_back(it.row(), it.col(), it.value());
  std::sort(entries.begin(), entries.end(),
            [](const auto &a, const auto &b) {
              return std::get<0>(a) != std::get<0>(b) ? std::get<0>(a) < std::get<0>(b)
                                                      : std::get<1>(a) < std::get<1>(b);
            });
  for (const auto &[row, col, value] : entries) {
    std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", row, col, value);
    out << buf;
  }
}

} // namespace wg
