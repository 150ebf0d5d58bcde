#include "wg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace wg {

int Mesh::n_interior_edges() const {
  int count = 0;
  for (const auto &e : edges)
    if (!e.is_boundary())
      ++count;
  return count;
}

int Mesh::n_boundary_edges() const { return n_edges() - n_interior_edges(); }

namespace {

double polygon_signed_area(const Mesh &mesh, const std::vector<int> &cycle) {
  double a = 0.0;
  const int m = static_cast<int>(cycle.size());
  for (int i = 0; i < m; ++i) {
    const Vec2 &p = mesh.vertices[cycle[i]];
    const Vec2 &q = mesh.vertices[cycle[(i + 1) % m]];
    a += cross2(p, q);
  }
  return 0.5 * a;
}

Vec2 polygon_centroid(const Mesh &mesh, const std::vector<int> &cycle, double area) {
  Vec2 c = Vec2::Zero();
  const int m = static_cast<int>(cycle.size());
  for (int i = 0; i < m; ++i) {
    const Vec2 &p = mesh.vertices[cycle[i]];
    const Vec2 &q = mesh.vertices[cycle[(i + 1) % m]];
    c += (p + q) * cross2(p, q);
  }
  return c / (6.0 * area);
}

} // namespace

void finalize_mesh(Mesh &mesh) {
  const int nv = mesh.n_vertices();
  const int ne = mesh.n_elements();

  mesh.edges.clear();
  mesh.element_edges.assign(ne, {});
  mesh.edge_orientation.assign(ne, {});
  mesh.edge_normals.assign(ne, {});
  mesh.element_areas.assign(ne, 0.0);
  mesh.element_diameters.assign(ne, 0.0);
  mesh.element_centroids.assign(ne, Vec2::Zero());

  std::map<std::pair<int, int>, int> edge_index;

  for (int t = 0; t < ne; ++t) {
    const auto &cycle = mesh.elements[t];
    const int m = static_cast<int>(cycle.size());
    if (m < 3)
      throw MeshValidationError("element " + std::to_string(t) + " has fewer than 3 vertices");
    for (int v : cycle)
      if (v < 0 || v >= nv)
        throw MeshValidationError("element " + std::to_string(t) + " references vertex " +
                                  std::to_string(v) + " out of range");

    const double area = polygon_signed_area(mesh, cycle);
    mesh.element_areas[t] = area;
    if (area > 0.0)
      mesh.element_centroids[t] = polygon_centroid(mesh, cycle, area);

    double diam = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        diam = std::max(diam, (mesh.vertices[cycle[i]] - mesh.vertices[cycle[j]]).norm());
    mesh.element_diameters[t] = diam;

    mesh.element_edges[t].resize(m);
    mesh.edge_orientation[t].resize(m);
    mesh.edge_normals[t].resize(m);

    for (int i = 0; i < m; ++i) {
      const int a = cycle[i];
      const int b = cycle[(i + 1) % m];
      if (a == b)
        throw MeshValidationError("element " + std::to_string(t) + " has a zero-length side");

      const auto key = std::minmax(a, b);
      auto it = edge_index.find(key);
      int ei;
      if (it == edge_index.end()) {
        MeshEdge edge;
        edge.v0 = key.first;
        edge.v1 = key.second;
        const Vec2 d = mesh.vertices[edge.v1] - mesh.vertices[edge.v0];
        edge.length = d.norm();
        edge.tangent = d / edge.length;
        edge.midpoint = 0.5 * (mesh.vertices[edge.v0] + mesh.vertices[edge.v1]);
        ei = static_cast<int>(mesh.edges.size());
        mesh.edges.push_back(edge);
        edge_index.emplace(key, ei);
      } else {
        ei = it->second;
      }

      const int orient = (a == mesh.edges[ei].v0) ? 1 : -1;
      if (orient > 0) {
        if (mesh.edges[ei].left < 0)
          mesh.edges[ei].left = t;
        // duplicate same-direction traversal is reported by validate()
      } else {
        if (mesh.edges[ei].right < 0)
          mesh.edges[ei].right = t;
      }
      mesh.element_edges[t][i] = ei;
      mesh.edge_orientation[t][i] = orient;

      // outward normal of a ccw polygon: travel direction rotated by -90 deg
      const Vec2 d = (mesh.vertices[b] - mesh.vertices[a]).normalized();
      mesh.edge_normals[t][i] = Vec2(d.y(), -d.x());
    }
  }

  mesh.mesh_size = 0.0;
  for (double h : mesh.element_diameters)
    mesh.mesh_size = std::max(mesh.mesh_size, h);
  if (mesh.level_label <= 0.0)
    mesh.level_label = mesh.mesh_size;
}

Mesh generate_uniform(int n, const Rect &domain, CellKind kind) {
  if (n < 1)
    throw std::invalid_argument("generate_uniform: n must be >= 1");
  if (!(domain.width() > 0.0) || !(domain.height() > 0.0))
    throw std::invalid_argument("generate_uniform: rectangle must have positive width and height");

  Mesh mesh;
  const int nv1 = n + 1;
  mesh.vertices.reserve(static_cast<size_t>(nv1) * nv1);
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      mesh.vertices.emplace_back(domain.x0 + domain.width() * i / n,
                                 domain.y0 + domain.height() * j / n);

  auto vid = [nv1](int i, int j) { return j * nv1 + i; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      if (kind == CellKind::Square) {
        mesh.elements.push_back({a, b, c, d});
      } else {
        // fixed split along the lower-left to upper-right diagonal
        mesh.elements.push_back({a, b, c});
        mesh.elements.push_back({a, c, d});
      }
    }
  }

  mesh.level_label = 1.0 / n;
  finalize_mesh(mesh);
  return mesh;
}

Mesh single_element_mesh(std::vector<Vec2> polygon) {
  Mesh mesh;
  mesh.vertices = std::move(polygon);
  std::vector<int> cycle(mesh.vertices.size());
  for (size_t i = 0; i < cycle.size(); ++i)
    cycle[i] = static_cast<int>(i);
  mesh.elements.push_back(cycle);
  finalize_mesh(mesh);
  return mesh;
}

std::string ValidationReport::summary() const {
  if (ok())
    return "all checks passed";
  std::ostringstream os;
  os << failures.size() << " check(s) failed:";
  for (const auto &f : failures) {
    os << "\n  [" << f.check << "]";
    if (f.index >= 0)
      os << " index " << f.index;
    os << ": " << f.detail;
  }
  return os.str();
}

ValidationReport validate(const Mesh &mesh) {
  ValidationReport report;
  auto fail = [&report](const std::string &check, int index, const std::string &detail) {
    report.failures.push_back({check, index, detail});
  };

  const int nv = mesh.n_vertices();

  for (int t = 0; t < mesh.n_elements(); ++t) {
    const auto &cycle = mesh.elements[t];
    const int m = static_cast<int>(cycle.size());
    if (m < 3) {
      fail("element_size", t, "fewer than 3 vertices");
      continue;
    }
    bool in_range = true;
    for (int v : cycle)
      if (v < 0 || v >= nv) {
        fail("vertex_range", t, "vertex index " + std::to_string(v) + " out of range");
        in_range = false;
      }
    if (!in_range)
      continue;

    std::vector<int> sorted(cycle);
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      fail("element_simple", t, "repeated vertex in cycle");

    const double area = polygon_signed_area(mesh, cycle);
    if (!(area > 0.0))
      fail("orientation", t, "signed area " + std::to_string(area) + " is not positive (clockwise or degenerate)");

    const double h = mesh.element_diameters.empty() ? 1.0 : mesh.element_diameters[t];
    for (int i = 0; i < m; ++i) {
      const Vec2 &p0 = mesh.vertices[cycle[(i + m - 1) % m]];
      const Vec2 &p1 = mesh.vertices[cycle[i]];
      const Vec2 &p2 = mesh.vertices[cycle[(i + 1) % m]];
      if (cross2(p1 - p0, p2 - p1) < -1e-12 * h * h) {
        fail("convexity", t, "reflex corner at cycle position " + std::to_string(i));
        break;
      }
    }
  }

  // Edge incidence cross-check against element cycles.
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> sides; // (elem, orient)
  for (int t = 0; t < mesh.n_elements(); ++t) {
    const auto &cycle = mesh.elements[t];
    const int m = static_cast<int>(cycle.size());
    for (int i = 0; i < m; ++i) {
      const int a = cycle[i], b = cycle[(i + 1) % m];
      if (a < 0 || b < 0 || a >= nv || b >= nv || a == b)
        continue;
      sides[std::minmax(a, b)].push_back({t, a < b ? 1 : -1});
    }
  }

  std::map<std::pair<int, int>, int> edge_table;
  for (int ei = 0; ei < mesh.n_edges(); ++ei) {
    const MeshEdge &e = mesh.edges[ei];
    edge_table[{e.v0, e.v1}] = ei;
    auto it = sides.find({e.v0, e.v1});
    if (it == sides.end()) {
      fail("edge_incidence", ei, "dangling edge: no incident element");
      continue;
    }
    const auto &inc = it->second;
    if (inc.size() > 2)
      fail("edge_incidence", ei, "more than two incident elements");
    if (inc.size() == 2 && inc[0].second == inc[1].second)
      fail("edge_incidence", ei, "both incidences traverse the edge in the same direction");
    const bool has_left = e.left >= 0, has_right = e.right >= 0;
    if (static_cast<size_t>(has_left) + static_cast<size_t>(has_right) != inc.size())
      fail("edge_incidence", ei, "left/right records inconsistent with element cycles");
  }
  for (const auto &kv : sides)
    if (edge_table.find(kv.first) == edge_table.end())
      fail("edge_incidence", -1,
           "element side (" + std::to_string(kv.first.first) + "," +
               std::to_string(kv.first.second) + ") missing from edge table");

  const long euler = static_cast<long>(nv) - mesh.n_edges() + mesh.n_elements();
  if (euler != 1)
    fail("euler", -1, "V - E + F = " + std::to_string(euler) + ", expected 1");

  for (int t = 0; t < mesh.n_elements(); ++t) {
    if (t >= static_cast<int>(mesh.edge_normals.size()))
      break;
    const auto &cycle = mesh.elements[t];
    const int m = static_cast<int>(cycle.size());
    if (static_cast<int>(mesh.edge_normals[t].size()) != m) {
      fail("normals", t, "normal count does not match side count");
      continue;
    }
    for (int i = 0; i < m; ++i) {
      const Vec2 &n = mesh.edge_normals[t][i];
      if (std::abs(n.norm() - 1.0) > 1e-12) {
        fail("normals", t, "non-unit normal on side " + std::to_string(i));
        continue;
      }
      const Vec2 mid = 0.5 * (mesh.vertices[cycle[i]] + mesh.vertices[cycle[(i + 1) % m]]);
      if (n.dot(mid - mesh.element_centroids[t]) <= 0.0)
        fail("normals", t, "normal on side " + std::to_string(i) + " is not outward");
    }
  }

  return report;
}

Mesh load_mesh(const std::string &text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;

  auto next_line = [&in, &line, &lineno]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r\n") != std::string::npos)
        return true;
    }
    return false;
  };

  if (!next_line())
    throw MeshParseError(lineno, "empty input");
  {
    std::istringstream ls(line);
    std::string tag;
    int version = 0;
    if (!(ls >> tag >> version) || tag != "wgmesh" || version != 1)
      throw MeshParseError(lineno, "expected header 'wgmesh 1'");
  }

  if (!next_line())
    throw MeshParseError(lineno, "expected 'vertices N'");
  int nv = 0;
  {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag >> nv) || tag != "vertices" || nv < 0)
      throw MeshParseError(lineno, "expected 'vertices N'");
  }

  Mesh mesh;
  mesh.vertices.reserve(nv);
  for (int i = 0; i < nv; ++i) {
    if (!next_line())
      throw MeshParseError(lineno, "unexpected end of input in vertex list");
    std::istringstream ls(line);
    double x, y;
    if (!(ls >> x >> y))
      throw MeshParseError(lineno, "expected 'x y'");
    mesh.vertices.emplace_back(x, y);
  }

  if (!next_line())
    throw MeshParseError(lineno, "expected 'elements M'");
  int nelem = 0;
  {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag >> nelem) || tag != "elements" || nelem < 0)
      throw MeshParseError(lineno, "expected 'elements M'");
  }

  for (int t = 0; t < nelem; ++t) {
    if (!next_line())
      throw MeshParseError(lineno, "unexpected end of input in element list");
    std::istringstream ls(line);
    int count = 0;
    if (!(ls >> count) || count < 3)
      throw MeshParseError(lineno, "expected vertex count >= 3");
    std::vector<int> cycle(count);
    for (int i = 0; i < count; ++i) {
      if (!(ls >> cycle[i]))
        throw MeshParseError(lineno, "expected " + std::to_string(count) + " vertex indices");
      if (cycle[i] < 0 || cycle[i] >= nv)
        throw MeshParseError(lineno, "vertex index " + std::to_string(cycle[i]) + " out of range");
    }
    mesh.elements.push_back(std::move(cycle));
  }

  finalize_mesh(mesh);
  ValidationReport report = validate(mesh);
  if (!report.ok())
    throw MeshValidationError("loaded mesh failed validation: " + report.summary());
  return mesh;
}

std::string save_mesh(const Mesh &mesh) {
  std::ostringstream os;
  char buf[96];
  os << "wgmesh 1\n";
  os << "vertices " << mesh.n_vertices() << "\n";
  for (const Vec2 &v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", v.x(), v.y());
    os << buf;
  }
  os << "elements " << mesh.n_elements() << "\n";
  for (const auto &cycle : mesh.elements) {
    os << cycle.size();
    for (int v : cycle)
      os << ' ' << v;
    os << '\n';
  }
  return os.str();
}

} // namespace wg
