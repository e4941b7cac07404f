#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "kfbem/error.hpp"
#include "kfbem/geometry.hpp"

using namespace kfbem;

namespace {

double total_area(const Mesh2D& m) {
  double a = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) a += m.area(t);
  return a;
}

DomainSpec disk_with_circle(double r) {
  DomainSpec d = DomainSpec::unit_disk();
  EmbeddedCurve c;
  c.kind = EmbeddedCurve::Kind::Circle;
  c.radius = r;
  d.embedded.push_back(c);
  return d;
}

bool on_segment(Point2 p, const Segment& s, double tol) {
  const Point2 d = s.b - s.a;
  const double t = dot(p - s.a, d) / dot(d, d);
  return t > -tol && t < 1.0 + tol && distance(p, s.at(t)) < tol;
}

}  // namespace

TEST_CASE("structured square mesh meets its size target and tiles the square") {
  for (double target : {0.5, 0.2, 0.07}) {
    const Mesh2D m = build_structured_mesh(DomainSpec::unit_square(), target);
    CHECK(m.d_max <= target * (1 + 1e-12));
    CHECK(total_area(m) == doctest::Approx(1.0).epsilon(1e-13));
    const EdgeAudit a = audit_mesh(m);
    CHECK(a.ok());
    CHECK(a.quasi_uniform);
    CHECK(a.boundary_edges == static_cast<int>(m.boundary.size()));
    // Euler characteristic of a disk-like triangulation
    CHECK(m.num_vertices() - m.num_edges() + m.num_triangles() == 1);
  }
}

TEST_CASE("every triangle is counter-clockwise and boundary faces are on the square") {
  const Mesh2D m = build_structured_mesh(DomainSpec::unit_square(), 0.2);
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto c = m.corners(t);
    CHECK(signed_area(c[0], c[1], c[2]) > 0.0);
  }
  for (const auto& f : m.boundary) {
    const Point2 a = m.vertices[f.edge[0]], b = m.vertices[f.edge[1]];
    const Point2 mid = (a + b) * 0.5;
    const bool on_side = std::abs(mid.y) < 1e-14 || std::abs(mid.x - 1) < 1e-14 || std::abs(mid.y - 1) < 1e-14 ||
                         std::abs(mid.x) < 1e-14;
    CHECK(on_side);
  }
}

TEST_CASE("neumann sides carry the neumann marker") {
  DomainSpec d = DomainSpec::unit_square();
  d.neumann_sides = {2};
  const Mesh2D m = build_structured_mesh(d, 0.25);
  int neumann = 0;
  for (const auto& f : m.boundary) {
    const double y = 0.5 * (m.vertices[f.edge[0]].y + m.vertices[f.edge[1]].y);
    if (f.marker == Marker::Neumann) {
      ++neumann;
      CHECK(y == doctest::Approx(1.0));
    }
  }
  CHECK(neumann > 0);
}

TEST_CASE("ring mesh of the disk resolves an embedded circle") {
  const Mesh2D m = build_ring_mesh(disk_with_circle(0.5), 16);
  CHECK(audit_mesh(m).ok());
  REQUIRE(m.embedded_loops.size() == 1);
  for (int v : m.embedded_loops[0]) CHECK(norm(m.vertices[v]) == doctest::Approx(0.5).epsilon(1e-14));
  const auto& loop = m.embedded_loops[0];
  for (std::size_t i = 0; i < loop.size(); ++i) CHECK(m.find_edge(loop[i], loop[(i + 1) % loop.size()]) >= 0);
  // inscribed polygon area of the outer boundary
  const double n = 6.0 * 16;
  CHECK(total_area(m) == doctest::Approx(0.5 * n * std::sin(2 * std::numbers::pi / n)).epsilon(1e-12));
}

TEST_CASE("doubling the ring count nests the embedded loop vertices") {
  const Mesh2D a = build_ring_mesh(disk_with_circle(0.5), 8);
  const Mesh2D b = build_ring_mesh(disk_with_circle(0.5), 16);
  const InterfaceMesh ia = interface_from_loop(a, 0), ib = interface_from_loop(b, 0);
  REQUIRE(ib.points.size() == 2 * ia.points.size());
  for (std::size_t i = 0; i < ia.points.size(); ++i) CHECK(distance(ia.points[i], ib.points[2 * i]) < 1e-14);
}

TEST_CASE("uniform refinement halves the mesh size and keeps embedded loops") {
  const Mesh2D a = build_ring_mesh(disk_with_circle(0.5), 6);
  const Mesh2D b = refine_uniform(a);
  CHECK(b.num_triangles() == 4 * a.num_triangles());
  CHECK(b.d_max == doctest::Approx(0.5 * a.d_max).epsilon(1e-12));
  REQUIRE(b.embedded_loops.size() == 1);
  CHECK(b.embedded_loops[0].size() == 2 * a.embedded_loops[0].size());
  const InterfaceMesh ia = interface_from_loop(a, 0), ib = interface_from_loop(b, 0);
  for (std::size_t i = 0; i < ia.points.size(); ++i) CHECK(distance(ia.points[i], ib.points[2 * i]) < 1e-14);
  CHECK(total_area(b) == doctest::Approx(total_area(a)).epsilon(1e-13));
}

TEST_CASE("star-shaped and non-star polygons are meshed") {
  DomainSpec hex;
  hex.kind = DomainSpec::Kind::Polygon;
  hex.polygon = regular_polygon({0, 0}, 1.0, 6);
  const Mesh2D m = build_structured_mesh(hex, 0.2);
  CHECK(audit_mesh(m).ok());
  CHECK(total_area(m) == doctest::Approx(1.5 * std::sqrt(3.0)).epsilon(1e-12));

  DomainSpec ell;
  ell.kind = DomainSpec::Kind::Polygon;
  ell.polygon = {{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
  const Mesh2D l = build_structured_mesh(ell, 0.3);
  CHECK(audit_mesh(l).ok());
  CHECK(l.d_max <= 0.3);
  CHECK(total_area(l) == doctest::Approx(3.0).epsilon(1e-12));

  DomainSpec cw = ell;
  std::reverse(cw.polygon.begin(), cw.polygon.end());
  CHECK(total_area(build_structured_mesh(cw, 0.3)) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("degenerate domains are rejected") {
  DomainSpec flat;
  flat.kind = DomainSpec::Kind::Polygon;
  flat.polygon = {{0, 0}, {1, 0}, {2, 0}};
  CHECK_THROWS_AS(build_structured_mesh(flat, 0.1), Error);

  DomainSpec bow;
  bow.kind = DomainSpec::Kind::Polygon;
  bow.polygon = {{0, 0}, {1, 1}, {1, 0}, {0, 1}};
  CHECK_THROWS_AS(build_structured_mesh(bow, 0.1), Error);

  CHECK_THROWS_AS(make_mesh({{0, 0}, {1, 0}, {2, 0}}, {{0, 1, 2}}, {}), Error);
  CHECK_THROWS_AS(build_structured_mesh(DomainSpec::unit_square(), 0.0), Error);
}

TEST_CASE("two-triangle mesh with a vertex outside the boundary list is rejected") {
  // boundary faces do not cover the topological boundary
  CHECK_THROWS_AS(make_mesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2}, {0, 2, 3}},
                            {{{0, 1}, Marker::Dirichlet, 0}}),
                  Error);
}

TEST_CASE("interface panel partition") {
  const InterfaceMesh i = build_interface({{0.25, 0.25}, {0.75, 0.25}, {0.75, 0.75}, {0.25, 0.75}}, 0.1, true);
  CHECK(i.num_panels() == 20);
  CHECK(i.h_max == doctest::Approx(0.1));
  const InterfaceMesh open = build_interface({{0.1, 0.1}, {0.9, 0.1}}, 0.3, false);
  CHECK(open.num_panels() == 3);
  CHECK_THROWS_AS(build_interface({{0.1, 0.1}, {0.1, 0.1}, {0.5, 0.5}}, 0.1, true), Error);
}

TEST_CASE("segment clipping against a triangle") {
  const std::array<Point2, 3> tri{{{0, 0}, {1, 0}, {0, 1}}};
  auto r = clip_segment({{-1, 0.25}, {2, 0.25}}, tri);
  REQUIRE(r);
  CHECK((*r)[0] == doctest::Approx(1.0 / 3.0));
  CHECK((*r)[1] == doctest::Approx(1.75 / 3.0));
  CHECK_FALSE(clip_segment({{2, 2}, {3, 3}}, tri));
  // collinear with an edge
  auto e = clip_segment({{-0.5, 0}, {0.5, 0}}, tri);
  REQUIRE(e);
  CHECK((*e)[0] == doctest::Approx(0.5));
  CHECK((*e)[1] == doctest::Approx(1.0));
  // touching a vertex only
  auto v = clip_segment({{1, 0}, {2, -1}}, tri);
  REQUIRE(v);
  CHECK((*v)[0] == doctest::Approx((*v)[1]));
  auto s = clip_panel_to_triangle({{0.1, 0.1}, {0.2, 0.2}}, tri);
  REQUIRE(s);
  CHECK(distance(s->a, {0.1, 0.1}) < 1e-15);
}

TEST_CASE("panel pieces tile each panel and lie in their triangles") {
  const Mesh2D m = build_structured_mesh(DomainSpec::unit_square(), 0.12);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Point2> pts;
    for (int i = 0; i < 4; ++i) pts.push_back({u(rng), u(rng)});
    const InterfaceMesh iface = interface_from_points(pts, false);
    const OverlapTable ov = compute_overlaps(m, iface);
    for (int l = 0; l < iface.num_panels(); ++l) {
      const auto pieces = panel_pieces(m, iface, ov, l);
      double covered = 0.0, last = 0.0;
      for (const auto& p : pieces) {
        CHECK(p.t0 == doctest::Approx(last).epsilon(1e-12));
        last = p.t1;
        covered += p.t1 - p.t0;
        const Segment seg = iface.panel(l);
        const auto tri = m.corners(p.triangle);
        CHECK(point_in_triangle(seg.at(0.5 * (p.t0 + p.t1)), tri, 1e-10));
        CHECK(std::binary_search(ov.triangles[l].begin(), ov.triangles[l].end(), p.triangle));
      }
      CHECK(covered == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("overlap table of a panel lying on mesh edges") {
  const Mesh2D m = build_structured_mesh(DomainSpec::unit_square(), 0.2);  // grid spacing 1/8
  const InterfaceMesh iface = interface_from_points({{0.25, 0.5}, {0.75, 0.5}}, false);
  const OverlapTable ov = compute_overlaps(m, iface);
  // every triangle touching the segment in more than a point lies above or below it
  for (int t : ov.triangles[0]) {
    const auto c = m.corners(t);
    bool has_edge_point = false;
    for (const auto& p : c) has_edge_point = has_edge_point || on_segment(p, iface.panel(0), 1e-12);
    CHECK(has_edge_point);
  }
  const auto pieces = panel_pieces(m, iface, ov, 0);
  CHECK(pieces.size() == 4);
  for (std::size_t i = 1; i < pieces.size(); ++i) CHECK(pieces[i].triangle != pieces[i - 1].triangle);
  CHECK(overlap_constant(ov, 0.5, m.d_max) > 0.0);
}

TEST_CASE("panel outside the domain") {
  const Mesh2D m = build_structured_mesh(DomainSpec::unit_square(), 0.5);
  const InterfaceMesh iface = interface_from_points({{0.5, 0.5}, {1.5, 0.5}}, false);
  CHECK_THROWS_AS(panel_pieces(m, iface, compute_overlaps(m, iface), 0), Error);
  const InterfaceMesh far = interface_from_points({{2.5, 0.5}, {3.5, 0.5}}, false);
  CHECK_THROWS_AS(compute_overlaps(m, far), Error);
}

TEST_CASE("mesh hash is stable and sensitive") {
  const Mesh2D a = build_structured_mesh(DomainSpec::unit_square(), 0.2);
  const Mesh2D b = build_structured_mesh(DomainSpec::unit_square(), 0.2);
  const Mesh2D c = build_structured_mesh(DomainSpec::unit_square(), 0.1);
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != c.hash());
}
