#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "kfbem/types.hpp"

namespace kfbem {

enum class Marker { Dirichlet, Neumann };

struct BoundaryFace {
  std::array<int, 2> edge{};
  Marker marker = Marker::Dirichlet;
  int side = 0;  // index of the domain side the face lies on
};

/// Conforming affine triangulation. Build with make_mesh(), which fills the
/// connectivity and quality fields and validates the invariants.
struct Mesh2D {
  std::vector<Point2> vertices;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  std::vector<BoundaryFace> boundary;

  double d_max = 0.0;
  double d_min = 0.0;
  double shape_constant = 0.0;     // max diam(T)/sqrt(|T|), equilateral triangle = 1
  double quasi_uniformity = 0.0;   // d_max / d_min
  int rings = 0;                   // ring count for ring meshes, 0 otherwise

  // Edges are stored with v0 < v1. Local edge k of a triangle is opposite vertex k.
  std::vector<std::array<int, 2>> edges;
  std::vector<std::array<int, 3>> triangle_edges;
  std::vector<std::array<int, 2>> edge_triangles;  // second entry -1 on the boundary
  std::vector<int> edge_face;                      // boundary face index or -1

  // Closed vertex loops that the mesh resolves (embedded interfaces).
  std::vector<std::vector<int>> embedded_loops;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }

  std::array<Point2, 3> corners(int t) const {
    const auto& tri = triangles[t];
    return {vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]};
  }
  double area(int t) const;
  double diameter(int t) const;
  int find_edge(int a, int b) const;  // -1 if absent

  std::uint64_t hash() const;
};

double signed_area(const Point2& a, const Point2& b, const Point2& c);
double triangle_diameter(const Point2& a, const Point2& b, const Point2& c);

/// Assembles connectivity and metrics; throws DegenerateDomain on inverted or
/// degenerate triangles, non-manifold edges, or boundary faces that do not
/// match the topological boundary.
Mesh2D make_mesh(std::vector<Point2> vertices, std::vector<std::array<int, 3>> triangles,
                 std::vector<BoundaryFace> boundary,
                 std::vector<std::vector<int>> embedded_loops = {});

struct EdgeAudit {
  int interior_edges = 0;
  int boundary_edges = 0;
  int orphan_edges = 0;     // interior edges with fewer than two owners
  int overshared_edges = 0; // edges owned by more than two triangles
  int inverted_triangles = 0;
  bool quasi_uniform = true;
  bool ok() const {
    return orphan_edges == 0 && overshared_edges == 0 && inverted_triangles == 0;
  }
};

/// Recounts edge ownership from the raw triangle list; boundary edges are the
/// ones listed as boundary faces.
EdgeAudit audit_mesh(const Mesh2D& mesh, double c_qu = 8.0);

/// A closed star-shaped curve resolved by the disk/polygon mesher.
struct EmbeddedCurve {
  enum class Kind { Circle, RegularPolygon, Polygon };
  Kind kind = Kind::Circle;
  double radius = 0.5;
  int sides = 0;
  double rotation = 0.0;
  std::vector<Point2> points;  // Polygon: counter-clockwise, star-shaped about the domain center
};

struct DomainSpec {
  enum class Kind { Rectangle, Polygon, Disk };
  Kind kind = Kind::Rectangle;
  Point2 lo{0.0, 0.0};
  Point2 hi{1.0, 1.0};
  std::vector<Point2> polygon;
  Point2 center{0.0, 0.0};
  double radius = 1.0;
  // Sides carrying a Neumann marker. Rectangle: 0 bottom, 1 right, 2 top, 3 left.
  // Polygon: edge i joins polygon[i] and polygon[i+1]. Disk: side 0 is the circle.
  std::vector<int> neumann_sides;
  std::vector<EmbeddedCurve> embedded;

  static DomainSpec unit_square();
  static DomainSpec unit_disk();
};

Mesh2D build_structured_mesh(const DomainSpec& domain, double target_d);

/// Ring mesh of a disk or star-shaped polygon with the given number of rings;
/// ring j carries about 6j vertices and embedded curves are pinned to rings.
Mesh2D build_ring_mesh(const DomainSpec& domain, int rings);
Mesh2D refine_uniform(const Mesh2D& mesh);

/// Vertices of a regular polygon with `sides` corners, counter-clockwise.
std::vector<Point2> regular_polygon(Point2 center, double radius, int sides, double rotation = 0.0);

bool point_in_triangle(const Point2& p, const std::array<Point2, 3>& tri, double tol = 1e-12);

/// Panel partition of a polyline.
struct InterfaceMesh {
  std::vector<Point2> points;  // panel endpoints; for closed curves the last panel wraps
  bool closed = true;
  double h_max = 0.0;
  double h_min = 0.0;

  int num_panels() const {
    const int n = static_cast<int>(points.size());
    return closed ? n : n - 1;
  }
  Segment panel(int l) const {
    const int n = static_cast<int>(points.size());
    return {points[l], points[(l + 1) % n]};
  }
};

InterfaceMesh build_interface(const std::vector<Point2>& polyline, double target_h, bool closed);

/// Uses the given points as panel endpoints without subdivision.
InterfaceMesh interface_from_points(std::vector<Point2> points, bool closed);

/// Interface made of the vertices of an embedded loop of the mesh.
InterfaceMesh interface_from_loop(const Mesh2D& mesh, int loop);

/// Parameter interval [t0, t1] of the part of the segment inside the closed
/// triangle; a point touch has t0 == t1.
std::optional<std::array<double, 2>> clip_segment(const Segment& seg,
                                                  const std::array<Point2, 3>& tri);

std::optional<Segment> clip_panel_to_triangle(const Segment& panel,
                                              const std::array<Point2, 3>& tri);

struct OverlapTable {
  std::vector<std::vector<int>> triangles;  // sorted, per panel

  int max_count() const;
  std::size_t total() const;
};

OverlapTable compute_overlaps(const Mesh2D& mesh, const InterfaceMesh& iface);

/// Piece of a panel assigned to one triangle; pieces of a panel tile [0, 1].
struct ClipPiece {
  int triangle = -1;
  double t0 = 0.0;
  double t1 = 0.0;
};

/// Splits a panel into elementary pieces; each piece goes to the lowest-index
/// triangle containing it. Throws PanelOutsideDomain if part of the panel is
/// not covered.
std::vector<ClipPiece> panel_pieces(const Mesh2D& mesh, const InterfaceMesh& iface,
                                    const OverlapTable& overlaps, int panel);

/// Overlap constant max_l |T(tau_l)| / (1 + h/d)^2.
double overlap_constant(const OverlapTable& overlaps, double h, double d);

}  // namespace kfbem
