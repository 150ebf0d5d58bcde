// Shared linear-algebra aliases, field function types, and error types.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>
#include <stdexcept>
#include <string>

namespace wg {

using Vec2 = Eigen::Vector2d;
using VectorXd = Eigen::VectorXd;
using MatrixXd = Eigen::MatrixXd;
using SparseMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

using ScalarField = std::function<double(const Vec2 &)>;
using VectorField = std::function<Vec2(const Vec2 &)>;

/// z-component of the planar cross product a x b.
inline double cross2(const Vec2 &a, const Vec2 &b) {
  return a.x() * b.y() - a.y() * b.x();
}

/// 2D trace pairing v x n = v1 n2 - v2 n1 (= -v.t for the ccw tangent t).
inline double cross_n(const Vec2 &v, const Vec2 &n) {
  return v.x() * n.y() - v.y() * n.x();
}

struct MeshParseError : std::runtime_error {
  int line;
  MeshParseError(int line_, const std::string &message)
      : std::runtime_error("mesh parse error at line " + std::to_string(line_) +
                           ": " + message),
        line(line_) {}
};

struct MeshValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

} // namespace wg
