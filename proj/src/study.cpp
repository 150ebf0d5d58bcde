#include "wg/study.hpp"

#include "wg/basis.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <ostream>

namespace wg {

GammaSpec GammaSpec::parse(const std::string &text) {
  GammaSpec spec;
  if (text == "invlog") {
    spec.kind = Kind::InvLog;
    return spec;
  }
  if (text.rfind("pow:", 0) == 0) {
    spec.kind = Kind::Power;
    try {
      spec.exponent = std::stod(text.substr(4));
    } catch (const std::exception &) {
      throw std::invalid_argument("gamma spec: cannot parse exponent in '" + text + "'");
    }
    if (!(spec.exponent > 0.0 && spec.exponent < 1.0))
      throw std::invalid_argument("gamma spec: exponent must lie in (0, 1)");
    return spec;
  }
  throw std::invalid_argument("gamma spec: expected 'pow:<eps>' or 'invlog', got '" + text + "'");
}

double GammaSpec::value(double h) const {
  if (!(h > 0.0))
    throw std::invalid_argument("gamma: refinement label must be positive");
  if (kind == Kind::Power)
    return std::pow(h, exponent);
  if (!(h < 1.0))
    throw std::invalid_argument("gamma invlog: needs h < 1 (n >= 2)");
  return -1.0 / std::log(h);
}

std::string GammaSpec::str() const {
  if (kind == Kind::InvLog)
    return "invlog";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "pow:%g", exponent);
  return buf;
}

std::vector<std::optional<double>> compute_order(const std::vector<double> &errors) {
  std::vector<std::optional<double>> orders;
  for (size_t i = 1; i < errors.size(); ++i) {
    if (errors[i - 1] > 0.0 && errors[i] > 0.0)
      orders.push_back(std::log2(errors[i - 1] / errors[i]));
    else
      orders.push_back(std::nullopt);
  }
  return orders;
}

EigenResult solve_level(const RunConfig &config, int n) {
  auto mesh = std::make_shared<Mesh>(generate_uniform(n, config.domain, config.cells));
  const double gamma = config.gamma.value(mesh->level_label);
  const WGSystem system = assemble(mesh, config.k, gamma, config.eps_r, config.mu_r);
  SolverConfig solver;
  solver.num_eigs = config.num_eigs;
  solver.shift = config.shift;
  solver.seed = config.seed;
  solver.dense_threshold = config.dense_threshold;
  return solve(system, solver);
}

std::vector<StudyRecord> run_study(const RunConfig &config, std::ostream *log) {
  std::vector<StudyRecord> records;
  for (int n : config.n_list) {
    const auto start = std::chrono::steady_clock::now();
    EigenResult result = solve_level(config, n);
    const auto stop = std::chrono::steady_clock::now();

    if (!result.complete)
      throw SolverError("level n=" + std::to_string(n) + ": only " +
                        std::to_string(result.count()) + " of " +
                        std::to_string(config.num_eigs) + " eigenpairs accepted");

    StudyRecord rec;
    rec.n = n;
    rec.seconds = std::chrono::duration<double>(stop - start).count();
    for (int j = 0; j < result.count(); ++j) {
      rec.lambda_h.push_back(result.eigenvalues[j]);
      rec.residual.push_back(result.residual_norms[j]);
      if (j < static_cast<int>(config.exact.size())) {
        const double err = config.exact[j] - result.eigenvalues[j];
        rec.error.push_back(err);
        rec.lower_bound_ok.push_back(err > 0.0);
      } else {
        rec.error.push_back(std::nullopt);
        rec.lower_bound_ok.push_back(std::nullopt);
      }
      rec.order.push_back(std::nullopt);
    }
    records.push_back(std::move(rec));

    if (log) {
      (*log) << "n=" << n << " lambda_h =";
      for (double v : records.back().lambda_h) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), " %.6f", v);
        (*log) << buf;
      }
      (*log) << "  (" << records.back().seconds << " s)\n";
    }
  }

  // observed orders per eigenvalue index across consecutive levels
  const int m = records.empty() ? 0 : static_cast<int>(records.front().lambda_h.size());
  for (int j = 0; j < m; ++j) {
    for (size_t l = 1; l < records.size(); ++l) {
      const auto &prev = records[l - 1].error[j];
      const auto &cur = records[l].error[j];
      if (prev && cur && *prev > 0.0 && *cur > 0.0)
        records[l].order[j] = std::log2(*prev / *cur);
    }
  }
  return records;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12e", v);
  return buf;
}

} // namespace

void write_study_csv(const std::vector<StudyRecord> &records, std::ostream &out) {
  out << "n,j,lambda_h,error,order,lower_bound_ok,residual,seconds\n";
  for (const auto &rec : records) {
    for (size_t j = 0; j < rec.lambda_h.size(); ++j) {
      out << rec.n << ',' << (j + 1) << ',' << fmt(rec.lambda_h[j]) << ',';
      if (rec.error[j])
        out << fmt(*rec.error[j]);
      out << ',';
      if (rec.order[j])
        out << fmt(*rec.order[j]);
      out << ',';
      if (rec.lower_bound_ok[j])
        out << (*rec.lower_bound_ok[j] ? "1" : "0");
      out << ',' << fmt(rec.residual[j]) << ',' << fmt(rec.seconds) << '\n';
    }
  }
}

int export_field(const Mesh &mesh, int k, const DofMap &dofmap, const VectorXd &u, int m,
                 std::ostream &out) {
  if (m < 1)
    throw std::invalid_argument("export_field: grid size must be >= 1");

  // domain bounding box (generated meshes fill their rectangle)
  Vec2 lo = mesh.vertices.front(), hi = mesh.vertices.front();
  for (const Vec2 &v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }

  // element bounding boxes for point location
  std::vector<Vec2> box_lo(mesh.n_elements()), box_hi(mesh.n_elements());
  for (int t = 0; t < mesh.n_elements(); ++t) {
    Vec2 a = mesh.vertices[mesh.elements[t][0]], b = a;
    for (int v : mesh.elements[t]) {
      a = a.cwiseMin(mesh.vertices[v]);
      b = b.cwiseMax(mesh.vertices[v]);
    }
    box_lo[t] = a;
    box_hi[t] = b;
  }

  auto inside = [&mesh](int t, const Vec2 &x) {
    const auto &cycle = mesh.elements[t];
    const int mm = static_cast<int>(cycle.size());
    const double tol = 1e-12 * mesh.element_diameters[t] * mesh.element_diameters[t];
    for (int i = 0; i < mm; ++i) {
      const Vec2 &p = mesh.vertices[cycle[i]];
      const Vec2 &q = mesh.vertices[cycle[(i + 1) % mm]];
      if (cross2(q - p, x - p) < -tol)
        return false;
    }
    return true;
  };

  const int np = element_scalar_dim(k);
  int skipped = 0;
  out << "x,y,u1,u2\n";
  for (int iy = 0; iy < m; ++iy) {
    for (int ix = 0; ix < m; ++ix) {
      const Vec2 x(lo.x() + (ix + 0.5) * (hi.x() - lo.x()) / m,
                   lo.y() + (iy + 0.5) * (hi.y() - lo.y()) / m);
      int found = -1;
      for (int t = 0; t < mesh.n_elements() && found < 0; ++t) {
        if (x.x() < box_lo[t].x() - 1e-14 || x.x() > box_hi[t].x() + 1e-14 ||
            x.y() < box_lo[t].y() - 1e-14 || x.y() > box_hi[t].y() + 1e-14)
          continue;
        if (inside(t, x))
          found = t;
      }
      if (found < 0) {
        ++skipped;
        continue;
      }
      const ElementBasis basis(mesh, found, k);
      const VectorXd phi = basis.eval(x);
      const int base = dofmap.u_elem_offset(found);
      const double u1 = phi.dot(u.segment(base, np));
      const double u2 = phi.dot(u.segment(base + np, np));
      out << fmt(x.x()) << ',' << fmt(x.y()) << ',' << fmt(u1) << ',' << fmt(u2) << '\n';
    }
  }
  return skipped;
}

} // namespace wg
