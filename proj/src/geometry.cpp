#include "kfbem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <numbers>
#include <unordered_map>

#include "kfbem/error.hpp"
#include "kfbem/hash.hpp"

namespace kfbem {

namespace {

// diam/sqrt(area) of the equilateral triangle
const double kEquilateralShape = 2.0 / std::sqrt(std::sqrt(3.0));

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

double signed_area(const Point2& a, const Point2& b, const Point2& c) {
  return 0.5 * cross(b - a, c - a);
}

double triangle_diameter(const Point2& a, const Point2& b, const Point2& c) {
  return std::max({distance(a, b), distance(b, c), distance(c, a)});
}

double Mesh2D::area(int t) const {
  const auto c = corners(t);
  return signed_area(c[0], c[1], c[2]);
}

double Mesh2D::diameter(int t) const {
  const auto c = corners(t);
  return triangle_diameter(c[0], c[1], c[2]);
}

int Mesh2D::find_edge(int a, int b) const {
  if (a > b) std::swap(a, b);
  auto it = std::lower_bound(edges.begin(), edges.end(), std::array<int, 2>{a, b});
  if (it != edges.end() && (*it)[0] == a && (*it)[1] == b) {
    return static_cast<int>(it - edges.begin());
  }
  return -1;
}

std::uint64_t Mesh2D::hash() const {
  Fnv1a h;
  h.update_vector(vertices);
  h.update_vector(triangles);
  for (const auto& f : boundary) {
    h.update_value(f.edge);
    h.update_value(static_cast<int>(f.marker));
  }
  return h.digest();
}

Mesh2D make_mesh(std::vector<Point2> vertices, std::vector<std::array<int, 3>> triangles,
                 std::vector<BoundaryFace> boundary, std::vector<std::vector<int>> embedded_loops) {
  Mesh2D m;
  m.vertices = std::move(vertices);
  m.triangles = std::move(triangles);
  m.boundary = std::move(boundary);
  m.embedded_loops = std::move(embedded_loops);
  if (m.triangles.empty()) throw Error(ErrorCode::DegenerateDomain, "mesh has no triangles");

  const int nv = m.num_vertices();
  m.d_max = 0.0;
  m.d_min = std::numeric_limits<double>::infinity();
  m.shape_constant = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    for (int v : m.triangles[t]) {
      if (v < 0 || v >= nv) throw Error(ErrorCode::DegenerateDomain, "vertex index out of range");
    }
    const double diam = m.diameter(t);
    const double a = m.area(t);
    if (!(a > 1e-14 * diam * diam)) {
      throw Error(ErrorCode::DegenerateDomain,
                  "triangle " + std::to_string(t) + " is degenerate or clockwise");
    }
    m.d_max = std::max(m.d_max, diam);
    m.d_min = std::min(m.d_min, diam);
    m.shape_constant = std::max(m.shape_constant, diam / std::sqrt(a) / kEquilateralShape);
  }
  m.quasi_uniformity = m.d_max / m.d_min;

  // collect edges in sorted order
  std::vector<std::array<int, 2>> all;
  all.reserve(3 * m.triangles.size());
  for (const auto& tri : m.triangles) {
    for (int k = 0; k < 3; ++k) {
      int a = tri[(k + 1) % 3], b = tri[(k + 2) % 3];
      if (a > b) std::swap(a, b);
      all.push_back({a, b});
    }
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  m.edges = std::move(all);

  std::unordered_map<std::uint64_t, int> index;
  index.reserve(m.edges.size() * 2);
  for (int e = 0; e < m.num_edges(); ++e) index.emplace(edge_key(m.edges[e][0], m.edges[e][1]), e);

  m.edge_triangles.assign(m.edges.size(), {-1, -1});
  m.triangle_edges.resize(m.triangles.size());
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    for (int k = 0; k < 3; ++k) {
      const int e = index.at(edge_key(tri[(k + 1) % 3], tri[(k + 2) % 3]));
      m.triangle_edges[t][k] = e;
      auto& owners = m.edge_triangles[e];
      if (owners[0] < 0) {
        owners[0] = t;
      } else if (owners[1] < 0) {
        owners[1] = t;
      } else {
        throw Error(ErrorCode::DegenerateDomain, "edge shared by more than two triangles");
      }
    }
  }

  m.edge_face.assign(m.edges.size(), -1);
  for (int f = 0; f < static_cast<int>(m.boundary.size()); ++f) {
    const auto& face = m.boundary[f];
    auto it = index.find(edge_key(face.edge[0], face.edge[1]));
    if (it == index.end()) throw Error(ErrorCode::DegenerateDomain, "boundary face is not a mesh edge");
    if (m.edge_triangles[it->second][1] >= 0) {
      throw Error(ErrorCode::DegenerateDomain, "boundary face on an interior edge");
    }
    m.edge_face[it->second] = f;
  }
  for (int e = 0; e < m.num_edges(); ++e) {
    if (m.edge_triangles[e][1] < 0 && m.edge_face[e] < 0) {
      throw Error(ErrorCode::DegenerateDomain, "boundary edge without marker");
    }
  }
  return m;
}

EdgeAudit audit_mesh(const Mesh2D& mesh, double c_qu) {
  EdgeAudit audit;
  std::unordered_map<std::uint64_t, int> owners;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const auto c = mesh.corners(t);
    if (!(signed_area(c[0], c[1], c[2]) > 0.0)) ++audit.inverted_triangles;
    for (int k = 0; k < 3; ++k) ++owners[edge_key(tri[(k + 1) % 3], tri[(k + 2) % 3])];
  }
  std::unordered_map<std::uint64_t, int> on_boundary;
  for (const auto& f : mesh.boundary) ++on_boundary[edge_key(f.edge[0], f.edge[1])];
  for (const auto& [key, count] : owners) {
    const bool is_boundary = on_boundary.count(key) > 0;
    if (count > 2) {
      ++audit.overshared_edges;
    } else if (is_boundary) {
      ++audit.boundary_edges;
      if (count != 1) ++audit.overshared_edges;
    } else if (count == 2) {
      ++audit.interior_edges;
    } else {
      ++audit.orphan_edges;
    }
  }
  audit.quasi_uniform = mesh.quasi_uniformity <= c_qu;
  return audit;
}

DomainSpec DomainSpec::unit_square() { return DomainSpec{}; }

DomainSpec DomainSpec::unit_disk() {
  DomainSpec d;
  d.kind = Kind::Disk;
  return d;
}

std::vector<Point2> regular_polygon(Point2 center, double radius, int sides, double rotation) {
  std::vector<Point2> pts;
  pts.reserve(sides);
  for (int i = 0; i < sides; ++i) {
    const double a = rotation + 2.0 * std::numbers::pi * i / sides;
    pts.push_back(center + Point2{radius * std::cos(a), radius * std::sin(a)});
  }
  return pts;
}

bool point_in_triangle(const Point2& p, const std::array<Point2, 3>& tri, double tol) {
  const double scale = triangle_diameter(tri[0], tri[1], tri[2]);
  for (int k = 0; k < 3; ++k) {
    const Point2 a = tri[k], b = tri[(k + 1) % 3];
    const Point2 e = b - a;
    if (cross(e, p - a) < -tol * scale * norm(e)) return false;
  }
  return true;
}

}  // namespace kfbem
