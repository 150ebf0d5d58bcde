#include "wg/eigensolver.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <random>

namespace wg {

namespace {

// ----------------------------------------------------------------------
// Saddle pencil helpers
// ----------------------------------------------------------------------

// Symmetric saddle matrix [[A, C^T], [C, -S_p]]. The -S_p block makes the
// p-elimination an additive (positive) penalty C^T S_p^{-1} C on the u block,
// which pushes constraint-violating modes above the physical spectrum; with
// +S_p they scatter through it.
SparseMat build_saddle_matrix(const WGSystem &sys) {
  const int nu = sys.dofmap.n_u;
  const int np = sys.dofmap.n_p;
  std::vector<Triplet> trip;
  trip.reserve(sys.A.nonZeros() + 2 * sys.C.nonZeros() + sys.S_p.nonZeros());
  for (int outer = 0; outer < sys.A.outerSize(); ++outer)
    for (SparseMat::InnerIterator it(sys.A, outer); it; ++it)
      trip.emplace_back(it.row(), it.col(), it.value());
  for (int outer = 0; outer < sys.C.outerSize(); ++outer)
    for (SparseMat::InnerIterator it(sys.C, outer); it; ++it) {
      trip.emplace_back(nu + it.row(), it.col(), it.value()); // C
      trip.emplace_back(it.col(), nu + it.row(), it.value()); // C^T
    }
  for (int outer = 0; outer < sys.S_p.outerSize(); ++outer)
    for (SparseMat::InnerIterator it(sys.S_p, outer); it; ++it)
      trip.emplace_back(nu + it.row(), nu + it.col(), -it.value());
  SparseMat m(nu + np, nu + np);
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return m;
}

// M - shift * N, where N = diag(B, 0).
SparseMat build_shifted_matrix(const WGSystem &sys, const SparseMat &saddle, double shift) {
  SparseMat shifted = saddle;
  if (shift != 0.0) {
    std::vector<Triplet> trip;
    trip.reserve(sys.B.nonZeros());
    for (int outer = 0; outer < sys.B.outerSize(); ++outer)
      for (SparseMat::InnerIterator it(sys.B, outer); it; ++it)
        trip.emplace_back(it.row(), it.col(), -shift * it.value());
    SparseMat shift_part(saddle.rows(), saddle.cols());
    shift_part.setFromTriplets(trip.begin(), trip.end());
    shifted += shift_part;
  }
  shifted.makeCompressed();
  return shifted;
}

struct Certificates {
  double residual;
  double constraint;
};

Certificates certify(const WGSystem &sys, double lambda, const VectorXd &u,
                     const VectorXd &p) {
  Certificates c;
  c.residual = (sys.A * u + sys.C.transpose() * p - lambda * (sys.B * u)).norm();
  c.constraint = (sys.C * u - sys.S_p * p).norm();
  return c;
}

// Deterministic start vectors decoupled from std::uniform_real_distribution.
VectorXd seeded_vector(int n, std::uint32_t seed) {
  std::mt19937 gen(seed);
  VectorXd v(n);
  for (int i = 0; i < n; ++i)
    v[i] = 2.0 * (gen() * (1.0 / 4294967296.0)) - 1.0;
  return v;
}

// ----------------------------------------------------------------------
// Dense path: static condensation onto the interior u-block.
//
// With x = (x_0, x_b, p), x_0 the interior u-dofs, the rows without
// B-energy read A_b0 x_0 + A_bb x_b = 0 and C_0 x_0 - S_p p = 0 (C has no
// edge columns and A has no edge-p coupling). A_bb and S_p are positive
// definite, so every finite eigenpair solves the symmetric condensed pencil
//   (A_00 - A_0b A_bb^{-1} A_b0 + C_0^T S_p^{-1} C_0) x_0 = lambda B_00 x_0.
// ----------------------------------------------------------------------

struct RawPairs {
  VectorXd lambdas;
  MatrixXd u_vecs;
  MatrixXd p_vecs;
};

RawPairs dense_solve_all(const WGSystem &sys) {
  const int nu = sys.dofmap.n_u;
  const int n0 = sys.dofmap.n_u_interior;
  const int nb = nu - n0;

  const MatrixXd a = MatrixXd(sys.A);
  const MatrixXd c0 = MatrixXd(sys.C).leftCols(n0);
  const MatrixXd sp = MatrixXd(sys.S_p);
  const MatrixXd b00 = MatrixXd(sys.B).topLeftCorner(n0, n0);

  const Eigen::LDLT<MatrixXd> abb(a.bottomRightCorner(nb, nb));
  const Eigen::LDLT<MatrixXd> spf(sp);
  if (abb.info() != Eigen::Success || spf.info() != Eigen::Success)
    throw SolverError("dense path: condensation block factorization failed");

  const MatrixXd xb = abb.solve(a.bottomLeftCorner(nb, n0)); // A_bb^{-1} A_b0
  const MatrixXd xp = spf.solve(c0);                         // S_p^{-1} C_0

  MatrixXd schur = a.topLeftCorner(n0, n0) -
                   a.topRightCorner(n0, nb) * xb + c0.transpose() * xp;
  schur = 0.5 * (schur + schur.transpose());

  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(schur, b00);
  if (es.info() != Eigen::Success)
    throw SolverError("dense path: generalized eigensolve failed");

  RawPairs raw;
  raw.lambdas = es.eigenvalues();
  const MatrixXd &x0 = es.eigenvectors();
  raw.u_vecs = MatrixXd::Zero(nu, n0);
  raw.u_vecs.topRows(n0) = x0;
  raw.u_vecs.bottomRows(nb) = -xb * x0;
  raw.p_vecs = xp * x0;
  return raw;
}

// ----------------------------------------------------------------------
// Iterative path: shift-invert Lanczos with B-semi-inner product.
// ----------------------------------------------------------------------

struct ShiftInvertOp {
  const WGSystem &sys;
  Eigen::SparseLU<SparseMat> lu;
  SparseMat shifted;
  int n_total;
  int n_u;

  explicit ShiftInvertOp(const WGSystem &system) : sys(system) {}

  bool factorize(double shift, const SparseMat &saddle) {
    shifted = build_shifted_matrix(sys, saddle, shift);
    lu.compute(shifted);
    if (lu.info() != Eigen::Success)
      return false;
    // a shift at (or numerically near) an eigenvalue can factor "successfully"
    // with tiny pivots; probe the solve quality before trusting it
    const VectorXd probe = VectorXd::Ones(shifted.rows());
    const VectorXd x = lu.solve(probe);
    if (!x.allFinite())
      return false;
    return (shifted * x - probe).norm() <= 1e-6 * probe.norm();
  }

  VectorXd apply_n(const VectorXd &x) const {
    VectorXd y = VectorXd::Zero(n_total);
    y.head(n_u) = sys.B * x.head(n_u);
    return y;
  }

  // (M - shift N)^{-1} N x with one step of iterative refinement.
  VectorXd apply(const VectorXd &x) const {
    const VectorXd b = apply_n(x);
    VectorXd y = lu.solve(b);
    const VectorXd r = b - shifted * y;
    y += lu.solve(r);
    return y;
  }

  double n_dot(const VectorXd &x, const VectorXd &y) const {
    return x.head(n_u).dot(sys.B * y.head(n_u));
  }
};

struct LockedPair {
  double theta;
  VectorXd x;
};

RawPairs lanczos_solve(const WGSystem &sys, const SolverConfig &config, double &shift_used) {
  const int nu = sys.dofmap.n_u;
  const int np = sys.dofmap.n_p;
  const int n = nu + np;
  const SparseMat saddle = build_saddle_matrix(sys);

  ShiftInvertOp op(sys);
  op.n_total = n;
  op.n_u = nu;

  double shift = config.shift;
  bool ok = false;
  for (int attempt = 0; attempt < 3 && !ok; ++attempt) {
    ok = op.factorize(shift, saddle);
    if (!ok) {
      std::cerr << "eigensolver: shift " << shift
                << " is (near) an eigenvalue of the pencil; perturbing by +0.01\n";
      shift += 0.01;
    }
  }
  if (!ok)
    throw SolverError("shift-invert factorization failed after 3 shift perturbations");
  shift_used = shift;

  const int m_max = config.subspace();
  const double conv_tol = 1e-11;
  const double breakdown_tol = 1e-13;

  std::vector<LockedPair> locked;
  auto b_orthogonalize = [&](VectorXd &w, const std::vector<VectorXd> &basis) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto &l : locked)
        w -= op.n_dot(w, l.x) * l.x;
      for (const auto &v : basis)
        w -= op.n_dot(w, v) * v;
    }
  };

  const int locked_cap = std::max(4 * config.num_eigs, 40);
  int sweeps_without_progress = 0;
  for (int restart = 0; restart < config.max_restarts; ++restart) {
    if (static_cast<int>(locked.size()) >= locked_cap)
      break;
    VectorXd start = op.apply(seeded_vector(n, config.seed + 7919u * restart));
    std::vector<VectorXd> basis;
    b_orthogonalize(start, basis);
    double nrm = std::sqrt(std::max(0.0, op.n_dot(start, start)));
    if (nrm < breakdown_tol)
      break; // B-range exhausted
    basis.push_back(start / nrm);

    std::vector<double> alphas, betas;
    int m_eff = 0;
    double beta_last = 0.0; // residual norm after the final Lanczos step
    for (int j = 0; j < m_max; ++j) {
      VectorXd w = op.apply(basis[j]);
      const double alpha = op.n_dot(w, basis[j]);
      w -= alpha * basis[j];
      if (j > 0)
        w -= betas[j - 1] * basis[j - 1];
      b_orthogonalize(w, basis);
      alphas.push_back(alpha);
      m_eff = j + 1;
      const double beta = std::sqrt(std::max(0.0, op.n_dot(w, w)));
      beta_last = beta;
      if (j + 1 == m_max || beta < breakdown_tol)
        break;
      betas.push_back(beta);
      basis.push_back(w / beta);
    }

    // Rayleigh-Ritz on the tridiagonal projection
    MatrixXd t = MatrixXd::Zero(m_eff, m_eff);
    for (int i = 0; i < m_eff; ++i) {
      t(i, i) = alphas[i];
      if (i + 1 < m_eff)
        t(i, i + 1) = t(i + 1, i) = betas[i];
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(t);
    const double theta_scale = es.eigenvalues().cwiseAbs().maxCoeff();

    int newly_locked = 0;
    for (int i = 0; i < m_eff; ++i) {
      const double theta = es.eigenvalues()[i];
      if (std::abs(theta) < 1e-10 * std::max(1.0, theta_scale))
        continue; // lambda effectively at infinity
      const double bound = std::abs(beta_last * es.eigenvectors()(m_eff - 1, i));
      if (bound > conv_tol * std::max(std::abs(theta), 1e-3 * theta_scale))
        continue;

      VectorXd x = VectorXd::Zero(n);
      for (int j = 0; j < m_eff; ++j)
        x += es.eigenvectors()(j, i) * basis[j];
      // purification step keeps the null-space of N out of the Ritz vector
      x = op.apply(x) / theta;
      for (int pass = 0; pass < 2; ++pass)
        for (const auto &l : locked)
          x -= op.n_dot(x, l.x) * l.x;
      const double xn = std::sqrt(std::max(0.0, op.n_dot(x, x)));
      if (xn < 1e-8)
        continue; // collapsed onto already-locked directions
      x /= xn;
      locked.push_back({theta, x});
      ++newly_locked;
    }

    // Count physically accepted pairs among locked ones.
    std::vector<double> accepted;
    for (const auto &l : locked) {
      const double lambda = shift + 1.0 / l.theta;
      if (lambda > config.tol_zero)
        accepted.push_back(lambda);
    }
    std::sort(accepted.begin(), accepted.end());

    if (newly_locked == 0)
      ++sweeps_without_progress;
    else
      sweeps_without_progress = 0;

    if (static_cast<int>(accepted.size()) >= config.num_eigs) {
      // one confirming sweep: stop once a full restart adds nothing below
      // the current num_eigs-th value
      if (newly_locked == 0)
        break;
      const double kth = accepted[config.num_eigs - 1];
      bool improved = false;
      for (int i = static_cast<int>(locked.size()) - newly_locked;
           i < static_cast<int>(locked.size()); ++i) {
        const double lambda = shift + 1.0 / locked[i].theta;
        if (lambda > config.tol_zero && lambda < kth * (1.0 - 1e-12))
          improved = true;
      }
      if (!improved && restart > 0)
        break;
    }
    if (sweeps_without_progress >= 3)
      break;
  }

  RawPairs raw;
  raw.lambdas.resize(locked.size());
  raw.u_vecs.resize(nu, locked.size());
  raw.p_vecs.resize(np, locked.size());
  for (size_t i = 0; i < locked.size(); ++i) {
    const VectorXd &x = locked[i].x;
    const VectorXd u = x.head(nu);
    const VectorXd p = x.tail(np);
    // Rayleigh quotient of the pencil minimizes the residual over lambda
    const double bnorm2 = u.dot(sys.B * u);
    const double mx = u.dot(sys.A * u) + 2.0 * p.dot(sys.C * u) - p.dot(sys.S_p * p);
    raw.lambdas[i] = bnorm2 > 0.0 ? mx / bnorm2 : std::numeric_limits<double>::infinity();
    raw.u_vecs.col(i) = u;
    raw.p_vecs.col(i) = p;
  }
  return raw;
}

} // namespace

EigenResult filter(const WGSystem &system, const VectorXd &lambdas, const MatrixXd &u_vecs,
                   const MatrixXd &p_vecs, const SolverConfig &config) {
  const int count = static_cast<int>(lambdas.size());
  std::vector<int> order(count);
  for (int i = 0; i < count; ++i)
    order[i] = i;
  std::sort(order.begin(), order.end(),
            [&lambdas](int a, int b) { return lambdas[a] < lambdas[b]; });

  EigenResult result;
  std::vector<int> kept;
  std::vector<double> kept_lambda;
  std::vector<VectorXd> kept_u, kept_p;
  std::vector<double> kept_res, kept_con;

  for (int idx : order) {
    const double lambda = lambdas[idx];
    if (!std::isfinite(lambda))
      continue;
    if (lambda <= config.tol_zero) {
      result.rejected.push_back({lambda, "nonphysical (lambda <= tol_zero)"});
      continue;
    }
    VectorXd u = u_vecs.col(idx);
    VectorXd p = p_vecs.col(idx);
    const double bnorm = std::sqrt(std::max(0.0, u.dot(system.B * u)));
    if (bnorm < 1e-10) {
      result.rejected.push_back({lambda, "multiplier mode (vanishing B-norm)"});
      continue;
    }
    u /= bnorm;
    p /= bnorm;

    bool duplicate = false;
    for (size_t j = 0; j < kept_lambda.size(); ++j) {
      if (std::abs(kept_lambda[j] - lambda) > 1e-10)
        continue;
      const double cosine = std::abs(kept_u[j].dot(system.B * u));
      if (cosine > 1.0 - 1e-6) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) {
      result.rejected.push_back({lambda, "duplicate"});
      continue;
    }

    const Certificates cert = certify(system, lambda, u, p);
    if (cert.residual > config.tol_res) {
      result.rejected.push_back({lambda, "residual " + std::to_string(cert.residual)});
      continue;
    }

    kept.push_back(idx);
    kept_lambda.push_back(lambda);
    kept_u.push_back(std::move(u));
    kept_p.push_back(std::move(p));
    kept_res.push_back(cert.residual);
    kept_con.push_back(cert.constraint);
  }

  const int n_keep = static_cast<int>(kept.size());
  result.eigenvalues.resize(n_keep);
  result.eigenvectors.resize(system.dofmap.n_u, n_keep);
  result.multipliers.resize(system.dofmap.n_p, n_keep);
  result.residual_norms.resize(n_keep);
  result.constraint_norms.resize(n_keep);
  for (int i = 0; i < n_keep; ++i) {
    result.eigenvalues[i] = kept_lambda[i];
    result.eigenvectors.col(i) = kept_u[i];
    result.multipliers.col(i) = kept_p[i];
    result.residual_norms[i] = kept_res[i];
    result.constraint_norms[i] = kept_con[i];
  }
  result.complete = n_keep >= config.num_eigs;
  return result;
}

EigenResult solve(const WGSystem &system, const SolverConfig &config) {
  if (config.num_eigs < 1)
    throw std::invalid_argument("solve: num_eigs must be >= 1");

  const int total = system.dofmap.n_u + system.dofmap.n_p;
  RawPairs raw;
  bool dense = total <= config.dense_threshold;
  if (dense) {
    raw = dense_solve_all(system);
  } else {
    double shift_used = config.shift;
    raw = lanczos_solve(system, config, shift_used);
  }

  EigenResult result = filter(system, raw.lambdas, raw.u_vecs, raw.p_vecs, config);
  result.used_dense_path = dense;

  // Trim to the requested count.
  if (result.count() > config.num_eigs) {
    const int keep = config.num_eigs;
    result.eigenvalues.conservativeResize(keep);
    result.eigenvectors.conservativeResize(Eigen::NoChange, keep);
    result.multipliers.conservativeResize(Eigen::NoChange, keep);
    result.residual_norms.conservativeResize(keep);
    result.constraint_norms.conservativeResize(keep);
  }
  result.complete = result.count() >= config.num_eigs;
  return result;
}

double vnorm(const WGSystem &system, const VectorXd &u) {
  if (u.size() != system.dofmap.n_u)
    throw std::invalid_argument("vnorm: dimension mismatch");
  const Mesh &mesh = *system.mesh;
  double sum = 0.0;
  for (int t = 0; t < mesh.n_elements(); ++t) {
    const VectorXd local = gather_local_u(system, t, u);
    const MatrixXd vm = vnorm_matrix(mesh, t, system.k, 1.0 / system.mu_r);
    sum += local.dot(vm * local);
  }
  return std::sqrt(std::max(0.0, sum));
}

SparseMat assemble_vnorm_matrix(const WGSystem &system) {
  const Mesh &mesh = *system.mesh;
  const DofMap &dm = system.dofmap;
  std::vector<Triplet> trip;
  for (int t = 0; t < mesh.n_elements(); ++t) {
    const MatrixXd vm = vnorm_matrix(mesh, t, system.k, 1.0 / system.mu_r);
    const auto &sides = mesh.element_edges[t];
    std::vector<int> idx(dm.u_block + sides.size() * dm.edge_block, -1);
    for (int j = 0; j < dm.u_block; ++j)
      idx[j] = dm.u_elem_offset(t) + j;
    for (size_t i = 0; i < sides.size(); ++i) {
      const int off = dm.u_edge_offset[sides[i]];
      if (off < 0)
        continue;
      for (int l = 0; l < dm.edge_block; ++l)
        idx[dm.u_block + i * dm.edge_block + l] = off + l;
    }
    for (size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] < 0)
        continue;
      for (size_t j = 0; j < idx.size(); ++j)
        if (idx[j] >= 0 && vm(i, j) != 0.0)
          trip.emplace_back(idx[i], idx[j], vm(i, j));
    }
  }
  SparseMat v(dm.n_u, dm.n_u);
  v.setFromTriplets(trip.begin(), trip.end());
  v.makeCompressed();
  return v;
}

} // namespace wg
