// Refinement-study harness: per-level eigenvalue errors and observed orders,
// CSV export, and eigenfunction field sampling.
#pragma once

#include "wg/common.hpp"
#include "wg/eigensolver.hpp"
#include "wg/mesh.hpp"

#include <cmath>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wg {

struct GammaSpec {
  enum class Kind { Power, InvLog };
  Kind kind = Kind::Power;
  double exponent = 0.1; // for Power; must lie in (0, 1)

  /// Parse "pow:<eps>" or "invlog".
  static GammaSpec parse(const std::string &text);
  /// Evaluate at the refinement label h (1/n for generated meshes).
  double value(double h) const;
  std::string str() const;
};

struct RunConfig {
  Rect domain{0.0, 0.0, M_PI, M_PI};
  std::vector<int> n_list{8, 16, 32, 64};
  CellKind cells = CellKind::Square;
  int k = 1;
  GammaSpec gamma;
  double eps_r = 1.0;
  double mu_r = 1.0;
  int num_eigs = 5;
  std::vector<double> exact; // optional exact eigenvalues for error columns
  double shift = 0.3;
  std::uint32_t seed = 20240501;
  int dense_threshold = 3000;
};

struct StudyRecord {
  int n = 0;
  double seconds = 0.0;
  std::vector<double> lambda_h;
  std::vector<double> residual;
  std::vector<std::optional<double>> error;          // lambda_exact - lambda_h
  std::vector<std::optional<double>> order;          // from the previous level
  std::vector<std::optional<bool>> lower_bound_ok;   // error > 0
};

/// order_i = log2(e_{i-1} / e_i) for errors at halving levels; entries are
/// empty when either error is not strictly positive.
std::vector<std::optional<double>> compute_order(const std::vector<double> &errors);

/// Run one level: generate the mesh, assemble with gamma(1/n), solve.
EigenResult solve_level(const RunConfig &config, int n);

/// Run all levels. Emits one record per level; throws SolverError if a level
/// fails to produce num_eigs accepted pairs.
std::vector<StudyRecord> run_study(const RunConfig &config, std::ostream *log = nullptr);

/// Fixed schema: n,j,lambda_h,error,order,lower_bound_ok,residual,seconds
void write_study_csv(const std::vector<StudyRecord> &records, std::ostream &out);

/// Evaluate the interior polynomial of a u-dof vector on an m x m grid of
/// cell centers, row-major in y then x. Points that cannot be located in any
/// element are skipped and counted. Columns: x,y,u1,u2.
int export_field(const Mesh &mesh, int k, const DofMap &dofmap, const VectorXd &u, int m,
                 std::ostream &out);

} // namespace wg
