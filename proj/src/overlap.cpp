#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kfbem/error.hpp"
#include "kfbem/geometry.hpp"

namespace kfbem {

namespace {

void panel_extent(InterfaceMesh& m) {
  m.h_max = 0.0;
  m.h_min = std::numeric_limits<double>::infinity();
  for (int l = 0; l < m.num_panels(); ++l) {
    const double h = m.panel(l).length();
    m.h_max = std::max(m.h_max, h);
    m.h_min = std::min(m.h_min, h);
  }
}

void check_distinct(const std::vector<Point2>& pts) {
  std::vector<std::pair<Point2, int>> sorted;
  double scale = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    sorted.emplace_back(pts[i], static_cast<int>(i));
    scale = std::max(scale, norm(pts[i] - pts[0]));
  }
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.first.x < b.first.x || (a.first.x == b.first.x && a.first.y < b.first.y);
  });
  const double tol = 1e-14 * std::max(scale, 1.0);
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      if (sorted[j].first.x - sorted[i].first.x > tol) break;
      if (distance(sorted[i].first, sorted[j].first) <= tol) {
        throw Error(ErrorCode::DegenerateInterface,
                    "points " + std::to_string(sorted[i].second) + " and " +
                        std::to_string(sorted[j].second) + " coincide");
      }
    }
  }
}

}  // namespace

InterfaceMesh build_interface(const std::vector<Point2>& polyline, double target_h, bool closed) {
  if (!(target_h > 0.0)) throw Error(ErrorCode::DegenerateInterface, "target_h must be positive");
  const std::size_t n = polyline.size();
  if (n < 2 || (closed && n < 3)) throw Error(ErrorCode::DegenerateInterface, "too few points");
  check_distinct(polyline);
  InterfaceMesh m;
  m.closed = closed;
  const std::size_t segments = closed ? n : n - 1;
  for (std::size_t i = 0; i < segments; ++i) {
    const Point2 a = polyline[i], b = polyline[(i + 1) % n];
    const int parts = std::max(1, static_cast<int>(std::ceil(distance(a, b) / target_h - 1e-12)));
    for (int k = 0; k < parts; ++k) m.points.push_back(a + (b - a) * (static_cast<double>(k) / parts));
  }
  if (!closed) m.points.push_back(polyline.back());
  panel_extent(m);
  return m;
}

InterfaceMesh interface_from_points(std::vector<Point2> points, bool closed) {
  if (points.size() < 2 || (closed && points.size() < 3)) {
    throw Error(ErrorCode::DegenerateInterface, "too few points");
  }
  check_distinct(points);
  InterfaceMesh m;
  m.points = std::move(points);
  m.closed = closed;
  panel_extent(m);
  return m;
}

InterfaceMesh interface_from_loop(const Mesh2D& mesh, int loop) {
  if (loop < 0 || loop >= static_cast<int>(mesh.embedded_loops.size())) {
    throw Error(ErrorCode::InterfaceNotResolved, "mesh has no embedded loop " + std::to_string(loop));
  }
  std::vector<Point2> pts;
  for (int v : mesh.embedded_loops[loop]) pts.push_back(mesh.vertices[v]);
  return interface_from_points(std::move(pts), true);
}

std::optional<std::array<double, 2>> clip_segment(const Segment& seg, const std::array<Point2, 3>& tri) {
  const Point2 d = seg.b - seg.a;
  const double scale = std::max(norm(d), triangle_diameter(tri[0], tri[1], tri[2]));
  double t0 = 0.0, t1 = 1.0;
  for (int k = 0; k < 3; ++k) {
    const Point2 a = tri[k], e = tri[(k + 1) % 3] - a;
    const double f0 = cross(e, seg.a - a);
    const double df = cross(e, d);
    const double tol = 1e-12 * norm(e) * scale;
    if (std::abs(df) <= tol) {
      // parallel to this edge: inside iff the whole line is
      if (f0 < -tol) return std::nullopt;
      continue;
    }
    const double t = -f0 / df;
    if (df > 0.0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
  }
  if (t0 > t1) {
    if ((t0 - t1) * norm(d) > 1e-12 * scale) return std::nullopt;
    const double mid = 0.5 * (t0 + t1);
    t0 = t1 = mid;
  }
  return std::array<double, 2>{t0, t1};
}

std::optional<Segment> clip_panel_to_triangle(const Segment& panel, const std::array<Point2, 3>& tri) {
  const auto iv = clip_segment(panel, tri);
  if (!iv) return std::nullopt;
  return Segment{panel.at((*iv)[0]), panel.at((*iv)[1])};
}

int OverlapTable::max_count() const {
  std::size_t m = 0;
  for (const auto& t : triangles) m = std::max(m, t.size());
  return static_cast<int>(m);
}

std::size_t OverlapTable::total() const {
  std::size_t s = 0;
  for (const auto& t : triangles) s += t.size();
  return s;
}

OverlapTable compute_overlaps(const Mesh2D& mesh, const InterfaceMesh& iface) {
  double xmin = 1e300, ymin = 1e300, xmax = -1e300, ymax = -1e300;
  for (const auto& p : mesh.vertices) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double cell = std::max(mesh.d_max, 1e-300);
  const int nx = std::clamp(static_cast<int>((xmax - xmin) / cell) + 1, 1, 4096);
  const int ny = std::clamp(static_cast<int>((ymax - ymin) / cell) + 1, 1, 4096);
  const double cx = (xmax - xmin) / nx + 1e-300, cy = (ymax - ymin) / ny + 1e-300;
  auto ix = [&](double x) { return std::clamp(static_cast<int>((x - xmin) / cx), 0, nx - 1); };
  auto iy = [&](double y) { return std::clamp(static_cast<int>((y - ymin) / cy), 0, ny - 1); };

  std::vector<std::vector<int>> grid(static_cast<std::size_t>(nx) * ny);
  const double pad = 1e-12 * cell;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto c = mesh.corners(t);
    const double x0 = std::min({c[0].x, c[1].x, c[2].x}) - pad, x1 = std::max({c[0].x, c[1].x, c[2].x}) + pad;
    const double y0 = std::min({c[0].y, c[1].y, c[2].y}) - pad, y1 = std::max({c[0].y, c[1].y, c[2].y}) + pad;
    for (int i = ix(x0); i <= ix(x1); ++i)
      for (int j = iy(y0); j <= iy(y1); ++j) grid[static_cast<std::size_t>(i) * ny + j].push_back(t);
  }

  OverlapTable table;
  table.triangles.resize(iface.num_panels());
  std::vector<int> candidates;
  for (int l = 0; l < iface.num_panels(); ++l) {
    const Segment s = iface.panel(l);
    candidates.clear();
    for (int i = ix(std::min(s.a.x, s.b.x) - pad); i <= ix(std::max(s.a.x, s.b.x) + pad); ++i) {
      for (int j = iy(std::min(s.a.y, s.b.y) - pad); j <= iy(std::max(s.a.y, s.b.y) + pad); ++j) {
        const auto& bucket = grid[static_cast<std::size_t>(i) * ny + j];
        candidates.insert(candidates.end(), bucket.begin(), bucket.end());
      }
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    const Point2 mid = s.at(0.5);
    bool mid_inside = false;
    for (int t : candidates) {
      const auto c = mesh.corners(t);
      if (clip_segment(s, c)) table.triangles[l].push_back(t);
      if (!mid_inside && point_in_triangle(mid, c)) mid_inside = true;
    }
    if (!mid_inside) {
      throw Error(ErrorCode::PanelOutsideDomain, "midpoint of panel " + std::to_string(l) + " is outside the mesh");
    }
  }
  return table;
}

std::vector<ClipPiece> panel_pieces(const Mesh2D& mesh, const InterfaceMesh& iface,
                                    const OverlapTable& overlaps, int panel) {
  const Segment s = iface.panel(panel);
  struct Interval {
    int t;
    double t0, t1;
  };
  std::vector<Interval> clips;
  std::vector<double> breaks{0.0, 1.0};
  for (int t : overlaps.triangles[panel]) {
    const auto iv = clip_segment(s, mesh.corners(t));
    if (!iv) continue;
    clips.push_back({t, (*iv)[0], (*iv)[1]});
    breaks.push_back((*iv)[0]);
    breaks.push_back((*iv)[1]);
  }
  std::sort(breaks.begin(), breaks.end());
  constexpr double kTol = 1e-12;
  std::vector<double> merged;
  for (double b : breaks) {
    if (merged.empty() || b - merged.back() > kTol) merged.push_back(b);
  }
  merged.front() = 0.0;
  if (merged.size() < 2) merged.push_back(1.0);
  merged.back() = 1.0;

  std::vector<ClipPiece> pieces;
  for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
    const double u = merged[i], v = merged[i + 1];
    const double mid = 0.5 * (u + v);
    int owner = -1;
    for (const auto& c : clips) {
      if (c.t0 - kTol <= mid && mid <= c.t1 + kTol && (owner < 0 || c.t < owner)) owner = c.t;
    }
    if (owner < 0) {
      throw Error(ErrorCode::PanelOutsideDomain, "panel " + std::to_string(panel) + " leaves the mesh");
    }
    if (!pieces.empty() && pieces.back().triangle == owner) {
      pieces.back().t1 = v;
    } else {
      pieces.push_back({owner, u, v});
    }
  }
  return pieces;
}

double overlap_constant(const OverlapTable& overlaps, double h, double d) {
  const double f = 1.0 + h / d;
  return overlaps.max_count() / (f * f);
}

}  // namespace kfbem
