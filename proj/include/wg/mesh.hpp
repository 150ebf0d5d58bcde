// Planar polygonal meshes: uniform generators for rectangles, derived edge
// topology with per-incidence outward normals, validation, and a plain-text
// exchange format.
#pragma once

#include "wg/common.hpp"

#include <vector>

namespace wg {

enum class CellKind { Square, RightTriangle };

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

struct MeshEdge {
  int v0 = -1, v1 = -1; // canonical orientation v0 < v1
  int left = -1;        // element seeing the edge run v0 -> v1 along its ccw cycle
  int right = -1;       // opposite incidence; -1 on the boundary
  double length = 0.0;
  Vec2 tangent = Vec2::Zero(); // unit, points v0 -> v1
  Vec2 midpoint = Vec2::Zero();
  bool is_boundary() const { return left < 0 || right < 0; }
};

struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::vector<int>> elements; // ccw vertex cycles

  // Derived by finalize_mesh:
  std::vector<MeshEdge> edges;
  std::vector<std::vector<int>> element_edges;    // edge index of side i (v_i -> v_{i+1})
  std::vector<std::vector<int>> edge_orientation; // +1 if side runs v0 -> v1, else -1
  std::vector<std::vector<Vec2>> edge_normals;    // outward unit normal per side
  std::vector<double> element_areas;
  std::vector<double> element_diameters;
  std::vector<Vec2> element_centroids;
  double mesh_size = 0.0;   // max element diameter
  double level_label = 0.0; // nominal refinement label (1/n for generated meshes)

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_elements() const { return static_cast<int>(elements.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }
  int n_interior_edges() const;
  int n_boundary_edges() const;
};

/// Derive edges, orientations, normals, areas, centroids and diameters from
/// vertices+elements. Throws MeshValidationError on malformed connectivity
/// (out-of-range indices, degenerate cycles).
void finalize_mesh(Mesh &mesh);

/// n x n grid of squares on the rectangle, optionally split into right
/// triangles along the lower-left to upper-right diagonal of each cell.
Mesh generate_uniform(int n, const Rect &domain, CellKind kind);

/// Convenience for local tests: a mesh holding one ccw polygon.
Mesh single_element_mesh(std::vector<Vec2> polygon);

struct ValidationReport {
  struct Failure {
    std::string check;
    int index; // offending element/edge index, -1 for global checks
    std::string detail;
  };
  std::vector<Failure> failures;
  bool ok() const { return failures.empty(); }
  std::string summary() const;
};

/// Check element orientation/convexity, edge incidence counts, the Euler
/// relation and normal consistency. Never throws; the report carries failures.
ValidationReport validate(const Mesh &mesh);

/// Parse the plain-text format:
///   wgmesh 1
///   vertices N
///   x y          (N lines)
///   elements M
///   c v1 ... vc  (M lines, ccw, 0-based)
/// Throws MeshParseError with a line number, or MeshValidationError if the
/// parsed mesh fails validation.
Mesh load_mesh(const std::string &text);

/// Serialize vertices and elements; derived data is never written.
std::string save_mesh(const Mesh &mesh);

} // namespace wg
