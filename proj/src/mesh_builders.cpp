#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "kfbem/error.hpp"
#include "kfbem/geometry.hpp"

namespace kfbem {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_neumann(const DomainSpec& domain, int side) {
  return std::find(domain.neumann_sides.begin(), domain.neumann_sides.end(), side) !=
         domain.neumann_sides.end();
}

double polygon_area(const std::vector<Point2>& p) {
  double a = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) a += cross(p[i], p[(i + 1) % p.size()]);
  return 0.5 * a;
}

Point2 polygon_centroid(const std::vector<Point2>& p) {
  double a = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Point2 u = p[i], v = p[(i + 1) % p.size()];
    const double w = cross(u, v);
    a += w;
    cx += (u.x + v.x) * w;
    cy += (u.y + v.y) * w;
  }
  return {cx / (3.0 * a), cy / (3.0 * a)};
}

int orient(Point2 a, Point2 b, Point2 c) {
  const double v = cross(b - a, c - a);
  const double scale = std::max({norm(b - a), norm(c - a), 1e-300});
  if (std::abs(v) <= 1e-14 * scale * scale) return 0;
  return v > 0 ? 1 : -1;
}

bool on_segment(Point2 a, Point2 b, Point2 p) {
  return std::min(a.x, b.x) - 1e-14 <= p.x && p.x <= std::max(a.x, b.x) + 1e-14 &&
         std::min(a.y, b.y) - 1e-14 <= p.y && p.y <= std::max(a.y, b.y) + 1e-14;
}

bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d) {
  const int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

void validate_polygon(const std::vector<Point2>& p) {
  const std::size_t n = p.size();
  if (n < 3) throw Error(ErrorCode::DegenerateDomain, "polygon needs at least 3 vertices");
  double scale = 0.0;
  for (const auto& q : p) scale = std::max(scale, norm(q - p[0]));
  if (std::abs(polygon_area(p)) <= 1e-14 * scale * scale) {
    throw Error(ErrorCode::DegenerateDomain, "polygon has zero area");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (distance(p[i], p[(i + 1) % n]) <= 1e-14 * scale) {
      throw Error(ErrorCode::DegenerateDomain, "polygon has coincident vertices");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n])) {
        throw Error(ErrorCode::DegenerateDomain, "polygon self-intersects");
      }
    }
  }
}

bool star_shaped_about(const std::vector<Point2>& p, Point2 c) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Point2 u = p[i] - c, v = p[(i + 1) % p.size()] - c;
    if (cross(u, v) <= 1e-12 * norm(u) * norm(v)) return false;
  }
  return true;
}

bool convex(const std::vector<Point2>& p) {
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (orient(p[i], p[(i + 1) % n], p[(i + 2) % n]) < 0) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Ring mesher for star-shaped domains: concentric rings of vertices between the
// center and the boundary, with selected rings pinned to embedded curves.

struct Anchor {
  bool polygon = false;
  double radius = 0.0;          // circle
  std::vector<Point2> corners;  // polygon, relative to the center, counter-clockwise
  double mean_radius = 0.0;
  int ring = 0;
};

double radial_distance(const Anchor& a, double theta) {
  if (!a.polygon) return a.radius;
  const Point2 dir{std::cos(theta), std::sin(theta)};
  const std::size_t n = a.corners.size();
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 p = a.corners[i], q = a.corners[(i + 1) % n];
    const Point2 e = q - p;
    const double den = cross(dir, e);
    if (std::abs(den) < 1e-300) continue;
    // solve s*dir = p + u*e
    const double s = cross(p, e) / den;
    const double u = cross(p, dir) / den;
    if (u >= -1e-12 && u <= 1.0 + 1e-12 && s > 0.0) best = std::max(best, s);
  }
  return best;
}

Anchor make_anchor(const EmbeddedCurve& curve, Point2 center) {
  Anchor a;
  switch (curve.kind) {
    case EmbeddedCurve::Kind::Circle:
      a.radius = curve.radius;
      a.mean_radius = curve.radius;
      return a;
    case EmbeddedCurve::Kind::RegularPolygon:
      a.polygon = true;
      a.corners = regular_polygon({0.0, 0.0}, curve.radius, curve.sides, curve.rotation);
      break;
    case EmbeddedCurve::Kind::Polygon:
      a.polygon = true;
      for (const auto& p : curve.points) a.corners.push_back(p - center);
      break;
  }
  if (a.corners.size() < 3) throw Error(ErrorCode::DegenerateDomain, "embedded polygon needs 3 corners");
  validate_polygon(a.corners);
  if (!star_shaped_about(a.corners, {0.0, 0.0})) {
    throw Error(ErrorCode::DegenerateDomain, "embedded curve is not star-shaped about the center");
  }
  double s = 0.0;
  for (const auto& p : a.corners) s += norm(p);
  a.mean_radius = s / static_cast<double>(a.corners.size());
  return a;
}

struct RingPoint {
  Point2 p;
  int side = 0;  // polygon edge the point starts (outer boundary only)
};

// Distributes n points over the polygon, corners included, each edge split into
// an integer number of equal parts proportional to its length.
std::vector<RingPoint> polygon_ring(const std::vector<Point2>& corners, int n) {
  const std::size_t m = corners.size();
  std::vector<double> len(m);
  double perimeter = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    len[i] = distance(corners[i], corners[(i + 1) % m]);
    perimeter += len[i];
  }
  n = std::max<int>(n, static_cast<int>(m));
  std::vector<int> parts(m, 1);
  int used = static_cast<int>(m);
  // largest-remainder apportionment of the remaining points
  std::vector<double> want(m);
  for (std::size_t i = 0; i < m; ++i) want[i] = n * len[i] / perimeter;
  while (used < n) {
    std::size_t best = 0;
    double best_gap = -1e300;
    for (std::size_t i = 0; i < m; ++i) {
      const double gap = want[i] - parts[i];
      if (gap > best_gap + 1e-12) {
        best_gap = gap;
        best = i;
      }
    }
    ++parts[best];
    ++used;
  }
  std::vector<RingPoint> out;
  for (std::size_t i = 0; i < m; ++i) {
    const Point2 a = corners[i], b = corners[(i + 1) % m];
    for (int k = 0; k < parts[i]; ++k) {
      out.push_back({a + (b - a) * (static_cast<double>(k) / parts[i]), static_cast<int>(i)});
    }
  }
  return out;
}

double angle_of(Point2 p) {
  double a = std::atan2(p.y, p.x);
  if (a < 0.0) a += kTwoPi;
  return a;
}

// Rotates the ring so it starts at the smallest polar angle.
void normalize_start(std::vector<int>& ring, const std::vector<Point2>& verts, Point2 c) {
  auto smaller = [&](int a, int b) { return angle_of(verts[a] - c) < angle_of(verts[b] - c); };
  auto it = std::min_element(ring.begin(), ring.end(), smaller);
  std::rotate(ring.begin(), it, ring.end());
}

void stitch(const std::vector<int>& inner, const std::vector<int>& outer,
            const std::vector<Point2>& verts, Point2 c, std::vector<std::array<int, 3>>& tris) {
  const std::size_t na = inner.size(), nb = outer.size();
  auto unwrapped = [&](const std::vector<int>& ring, std::size_t i) {
    const std::size_t n = ring.size();
    double a = angle_of(verts[ring[i % n]] - c);
    if (i >= n) a += kTwoPi;
    return a;
  };
  auto area = [&](int a, int b, int d) { return signed_area(verts[a], verts[b], verts[d]); };
  std::size_t i = 0, k = 0;
  while (i < na || k < nb) {
    const int a = inner[i % na], b = outer[k % nb];
    const int a1 = inner[(i + 1) % na], b1 = outer[(k + 1) % nb];
    bool advance_outer;
    if (i == na) {
      advance_outer = true;
    } else if (k == nb) {
      advance_outer = false;
    } else {
      advance_outer = unwrapped(outer, k + 1) <= unwrapped(inner, i + 1);
      const double scale = distance(verts[a], verts[b]);
      const double eps = 1e-12 * scale * scale;
      if (advance_outer && area(a, b, b1) <= eps) advance_outer = false;
      else if (!advance_outer && area(a, b, a1) <= eps) advance_outer = true;
    }
    if (advance_outer) {
      tris.push_back({a, b, b1});
      ++k;
    } else {
      tris.push_back({a, b, a1});
      ++i;
    }
  }
}

Mesh2D ring_mesh(const DomainSpec& domain, int rings) {
  Point2 center;
  Anchor outer;
  if (domain.kind == DomainSpec::Kind::Disk) {
    center = domain.center;
    outer.radius = domain.radius;
    outer.mean_radius = domain.radius;
  } else {
    center = polygon_centroid(domain.polygon);
    outer.polygon = true;
    for (const auto& p : domain.polygon) outer.corners.push_back(p - center);
    double s = 0.0;
    for (const auto& p : outer.corners) s += norm(p);
    outer.mean_radius = s / static_cast<double>(outer.corners.size());
  }
  std::vector<Anchor> anchors;
  for (const auto& curve : domain.embedded) anchors.push_back(make_anchor(curve, center));
  std::sort(anchors.begin(), anchors.end(),
            [](const Anchor& a, const Anchor& b) { return a.mean_radius < b.mean_radius; });
  for (const auto& a : anchors) {
    if (a.mean_radius >= outer.mean_radius) {
      throw Error(ErrorCode::DegenerateDomain, "embedded curve does not lie inside the domain");
    }
  }
  const int needed = static_cast<int>(anchors.size()) + 1;
  rings = std::max(rings, needed);
  int prev = 0;
  for (auto& a : anchors) {
    a.ring = static_cast<int>(std::lround(a.mean_radius / outer.mean_radius * rings));
    a.ring = std::clamp(a.ring, prev + 1, rings - 1);
    prev = a.ring;
  }
  if (!anchors.empty() && anchors.back().ring >= rings) {
    throw Error(ErrorCode::DegenerateDomain, "too few rings to resolve embedded curves");
  }
  outer.ring = rings;
  anchors.push_back(outer);

  std::vector<Point2> verts{center};
  std::vector<std::array<int, 3>> tris;
  std::vector<std::vector<int>> loops;
  std::vector<int> outer_side;
  std::vector<int> previous{0};
  std::size_t next_anchor = 0;
  const Anchor* lower = nullptr;  // null means the center
  int lower_ring = 0;

  for (int j = 1; j <= rings; ++j) {
    const Anchor& upper = anchors[next_anchor];
    std::vector<int> ring;
    const int n_uniform = 6 * j;
    if (j == upper.ring && upper.polygon) {
      for (const auto& rp : polygon_ring(upper.corners, n_uniform)) {
        ring.push_back(static_cast<int>(verts.size()));
        verts.push_back(center + rp.p);
        if (j == rings) outer_side.push_back(rp.side);
      }
    } else {
      const double w = static_cast<double>(j - lower_ring) / (upper.ring - lower_ring);
      for (int i = 0; i < n_uniform; ++i) {
        const double theta = kTwoPi * i / n_uniform;
        const double r_lo = lower ? radial_distance(*lower, theta) : 0.0;
        const double r = (1.0 - w) * r_lo + w * radial_distance(upper, theta);
        ring.push_back(static_cast<int>(verts.size()));
        verts.push_back(center + Point2{r * std::cos(theta), r * std::sin(theta)});
        if (j == rings) outer_side.push_back(0);
      }
    }
    normalize_start(ring, verts, center);
    if (j == 1) {
      for (std::size_t k = 0; k < ring.size(); ++k) {
        tris.push_back({0, ring[k], ring[(k + 1) % ring.size()]});
      }
    } else {
      stitch(previous, ring, verts, center, tris);
    }
    if (j == upper.ring) {
      if (j < rings) loops.push_back(ring);
      lower = &upper;
      lower_ring = j;
      ++next_anchor;
    }
    previous = std::move(ring);
  }

  // side labels follow the ring order after rotation
  std::vector<BoundaryFace> faces;
  const std::size_t nb = previous.size();
  const int first_outer = previous.empty() ? 0 : *std::min_element(previous.begin(), previous.end());
  for (std::size_t k = 0; k < nb; ++k) {
    const int a = previous[k], b = previous[(k + 1) % nb];
    const int side = outer_side[a - first_outer];
    faces.push_back({{a, b}, is_neumann(domain, side) ? Marker::Neumann : Marker::Dirichlet, side});
  }
  Mesh2D mesh = make_mesh(std::move(verts), std::move(tris), std::move(faces), std::move(loops));
  mesh.rings = rings;
  return mesh;
}

// ---------------------------------------------------------------------------

Mesh2D rectangle_mesh(const DomainSpec& domain) {
  const Point2 lo = domain.lo, hi = domain.hi;
  if (!(hi.x > lo.x && hi.y > lo.y)) throw Error(ErrorCode::DegenerateDomain, "rectangle has zero area");
  std::vector<Point2> v{lo, {hi.x, lo.y}, hi, {lo.x, hi.y}};
  std::vector<std::array<int, 3>> t{{0, 1, 2}, {0, 2, 3}};
  std::vector<BoundaryFace> f;
  for (int s = 0; s < 4; ++s) {
    f.push_back({{s, (s + 1) % 4}, is_neumann(domain, s) ? Marker::Neumann : Marker::Dirichlet, s});
  }
  return make_mesh(std::move(v), std::move(t), std::move(f));
}

Mesh2D ear_clip_mesh(const DomainSpec& domain) {
  std::vector<Point2> p = domain.polygon;
  const int n = static_cast<int>(p.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const bool ccw = polygon_area(p) > 0.0;
  std::vector<int> remaining = order;
  if (!ccw) std::reverse(remaining.begin(), remaining.end());
  std::vector<std::array<int, 3>> tris;
  int guard = 0;
  while (remaining.size() > 3) {
    const std::size_t m = remaining.size();
    bool clipped = false;
    for (std::size_t i = 0; i < m; ++i) {
      const int a = remaining[(i + m - 1) % m], b = remaining[i], c = remaining[(i + 1) % m];
      if (orient(p[a], p[b], p[c]) <= 0) continue;
      bool empty = true;
      for (int q : remaining) {
        if (q == a || q == b || q == c) continue;
        if (point_in_triangle(p[q], {p[a], p[b], p[c]}, 1e-12)) {
          empty = false;
          break;
        }
      }
      if (!empty) continue;
      tris.push_back({a, b, c});
      remaining.erase(remaining.begin() + static_cast<long>(i));
      clipped = true;
      break;
    }
    if (!clipped || ++guard > 4 * n) throw Error(ErrorCode::DegenerateDomain, "ear clipping failed");
  }
  tris.push_back({remaining[0], remaining[1], remaining[2]});
  std::vector<BoundaryFace> f;
  for (int s = 0; s < n; ++s) {
    f.push_back({{s, (s + 1) % n}, is_neumann(domain, s) ? Marker::Neumann : Marker::Dirichlet, s});
  }
  return make_mesh(std::move(p), std::move(tris), std::move(f));
}

Mesh2D refine_until(Mesh2D mesh, double target_d) {
  while (mesh.d_max > target_d * (1.0 + 1e-12)) mesh = refine_uniform(mesh);
  return mesh;
}

}  // namespace

Mesh2D build_ring_mesh(const DomainSpec& domain, int rings) {
  if (domain.kind == DomainSpec::Kind::Rectangle) {
    throw Error(ErrorCode::DegenerateDomain, "ring meshes need a disk or star-shaped polygon");
  }
  if (domain.kind == DomainSpec::Kind::Polygon) validate_polygon(domain.polygon);
  return ring_mesh(domain, std::max(rings, 1));
}

Mesh2D build_structured_mesh(const DomainSpec& spec, double target_d) {
  if (!(target_d > 0.0)) throw Error(ErrorCode::DegenerateDomain, "target_d must be positive");
  DomainSpec domain = spec;
  if (domain.kind == DomainSpec::Kind::Polygon && domain.polygon.size() >= 3 &&
      polygon_area(domain.polygon) < 0.0) {
    // clockwise input: reverse and renumber the sides
    const int n = static_cast<int>(domain.polygon.size());
    std::reverse(domain.polygon.begin(), domain.polygon.end());
    for (int& s : domain.neumann_sides) s = ((n - 2 - s) % n + n) % n;
  }
  switch (domain.kind) {
    case DomainSpec::Kind::Rectangle:
      if (!domain.embedded.empty()) {
        throw Error(ErrorCode::DegenerateDomain, "embedded curves need a disk or polygon domain");
      }
      return refine_until(rectangle_mesh(domain), target_d);
    case DomainSpec::Kind::Polygon: {
      validate_polygon(domain.polygon);
      // reentrant corners squash the inner rings, so those go to the ear clipper
      const bool star = star_shaped_about(domain.polygon, polygon_centroid(domain.polygon));
      if (star && (convex(domain.polygon) || !domain.embedded.empty())) break;
      if (!domain.embedded.empty()) {
        throw Error(ErrorCode::DegenerateDomain, "embedded curves need a star-shaped domain");
      }
      return refine_until(ear_clip_mesh(domain), target_d);
    }
    case DomainSpec::Kind::Disk:
      if (!(domain.radius > 0.0)) throw Error(ErrorCode::DegenerateDomain, "disk radius must be positive");
      break;
  }
  double extent = domain.radius;
  if (domain.kind == DomainSpec::Kind::Polygon) {
    const Point2 c = polygon_centroid(domain.polygon);
    extent = 0.0;
    for (const auto& p : domain.polygon) extent += distance(p, c);
    extent /= static_cast<double>(domain.polygon.size());
  }
  int rings = std::max(1, static_cast<int>(std::ceil(extent / target_d)));
  for (;;) {
    Mesh2D mesh = ring_mesh(domain, rings);
    if (mesh.d_max <= target_d * (1.0 + 1e-12)) return mesh;
    rings = std::max(rings + 1, static_cast<int>(std::ceil(rings * mesh.d_max / target_d)) - 1);
  }
}

Mesh2D refine_uniform(const Mesh2D& mesh) {
  const int nv = mesh.num_vertices();
  std::vector<Point2> verts = mesh.vertices;
  verts.reserve(nv + mesh.num_edges());
  for (const auto& e : mesh.edges) verts.push_back((mesh.vertices[e[0]] + mesh.vertices[e[1]]) * 0.5);
  std::vector<std::array<int, 3>> tris;
  tris.reserve(4 * mesh.triangles.size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& v = mesh.triangles[t];
    const auto& e = mesh.triangle_edges[t];
    const int m12 = nv + e[0], m20 = nv + e[1], m01 = nv + e[2];
    tris.push_back({v[0], m01, m20});
    tris.push_back({m01, v[1], m12});
    tris.push_back({m20, m12, v[2]});
    tris.push_back({m01, m12, m20});
  }
  std::vector<BoundaryFace> faces;
  faces.reserve(2 * mesh.boundary.size());
  for (const auto& f : mesh.boundary) {
    const int mid = nv + mesh.find_edge(f.edge[0], f.edge[1]);
    faces.push_back({{f.edge[0], mid}, f.marker, f.side});
    faces.push_back({{mid, f.edge[1]}, f.marker, f.side});
  }
  std::vector<std::vector<int>> loops;
  for (const auto& loop : mesh.embedded_loops) {
    std::vector<int> refined;
    for (std::size_t i = 0; i < loop.size(); ++i) {
      refined.push_back(loop[i]);
      refined.push_back(nv + mesh.find_edge(loop[i], loop[(i + 1) % loop.size()]));
    }
    loops.push_back(std::move(refined));
  }
  return make_mesh(std::move(verts), std::move(tris), std::move(faces), std::move(loops));
}

}  // namespace kfbem
