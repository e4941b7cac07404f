#include <algorithm>
#include <cmath>
#include <numbers>

#include "kfbem/quadrature.hpp"
#include "kfbem/reference.hpp"

namespace kfbem {

namespace {

constexpr double kInvTwoPi = 0.5 / std::numbers::pi;

double leg01(int q, double t) { return legendre(q, 2.0 * t - 1.0); }

bool same_point(Point2 a, Point2 b, double scale) { return distance(a, b) <= 1e-12 * scale; }

double segment_distance(const Segment& a, const Segment& b) {
  auto point_seg = [](Point2 p, const Segment& s) {
    const Point2 d = s.b - s.a;
    const double len2 = dot(d, d);
    double t = len2 > 0.0 ? dot(p - s.a, d) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return distance(p, s.at(t));
  };
  return std::min({point_seg(a.a, b), point_seg(a.b, b), point_seg(b.a, a), point_seg(b.b, a)});
}

quad::GradedRuleParams graded_params(const KernelQuadrature& q) {
  return {q.graded_levels, q.graded_ratio, q.graded_points};
}

double identical_integral(const Segment& p, int qx, int qy, const KernelQuadrature& kq) {
  const auto& g = quad::graded_toward_zero(graded_params(kq));
  const double len = p.length();
  auto inner = [&](double s) {
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double tl = s * g.nodes[i];
      if (tl > 0.0) acc += s * g.weights[i] * leg01(qy, s - tl) * std::log(len * tl);
      const double tr = (1.0 - s) * g.nodes[i];
      if (tr > 0.0) acc += (1.0 - s) * g.weights[i] * leg01(qy, s + tr) * std::log(len * tr);
    }
    return acc;
  };
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double w = 0.5 * g.weights[i];
    const double s0 = 0.5 * g.nodes[i];
    const double s1 = 1.0 - s0;
    total += w * leg01(qx, s0) * inner(s0);
    total += w * leg01(qx, s1) * inner(s1);
  }
  return -kInvTwoPi * len * len * total;
}

double touching_integral(const Segment& px, int qx, bool x_flip, const Segment& py, int qy, bool y_flip,
                         const KernelQuadrature& kq) {
  const auto& g = quad::graded_toward_zero(graded_params(kq));
  const Point2 vx = x_flip ? px.b : px.a;
  const Point2 ex = (x_flip ? px.a : px.b) - vx;
  const Point2 vy = y_flip ? py.b : py.a;
  const Point2 ey = (y_flip ? py.a : py.b) - vy;
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double s = g.nodes[i];
    const double bx = leg01(qx, x_flip ? 1.0 - s : s);
    double inner = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double t = g.nodes[j];
      const Point2 diff = s * ex - t * ey;
      inner += g.weights[j] * leg01(qy, y_flip ? 1.0 - t : t) * std::log(norm(diff));
    }
    total += g.weights[i] * bx * inner;
  }
  return -kInvTwoPi * px.length() * py.length() * total;
}

double composite_integral(const Segment& px, int qx, const Segment& py, int qy, int pieces, int points) {
  const auto& g = quad::gauss_legendre(points);
  double total = 0.0;
  for (int a = 0; a < pieces; ++a) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double s = (a + g.nodes[i]) / pieces;
      const double ws = g.weights[i] / pieces;
      const Point2 x = px.at(s);
      double inner = 0.0;
      for (int b = 0; b < pieces; ++b) {
        for (std::size_t j = 0; j < g.size(); ++j) {
          const double t = (b + g.nodes[j]) / pieces;
          inner += g.weights[j] / pieces * leg01(qy, t) * std::log(distance(x, py.at(t)));
        }
      }
      total += ws * leg01(qx, s) * inner;
    }
  }
  return -kInvTwoPi * px.length() * py.length() * total;
}

double regular_integral(const GreenKernel& kernel, const Segment& px, int qx, const Segment& py, int qy,
                        int points) {
  const auto& g = quad::gauss_legendre(points);
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point2 x = px.at(g.nodes[i]);
    double inner = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j)
      inner += g.weights[j] * leg01(qy, g.nodes[j]) * kernel.regular_part(x, py.at(g.nodes[j]));
    total += g.weights[i] * leg01(qx, g.nodes[i]) * inner;
  }
  return px.length() * py.length() * total;
}

}  // namespace

double log_panel_integral(const Segment& px, int qx, const Segment& py, int qy, const KernelQuadrature& quad) {
  const double scale = std::max(px.length(), py.length());
  const bool same = (same_point(px.a, py.a, scale) && same_point(px.b, py.b, scale));
  if (same) return identical_integral(px, qx, qy, quad);
  if (same_point(px.a, py.b, scale) && same_point(px.b, py.a, scale)) {
    // Same panel with opposite orientation.
    const double sign = ((qy % 2) == 1) ? -1.0 : 1.0;
    return sign * identical_integral(px, qx, qy, quad);
  }
  const Point2 ends_x[2] = {px.a, px.b};
  const Point2 ends_y[2] = {py.a, py.b};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      if (same_point(ends_x[i], ends_y[j], scale)) return touching_integral(px, qx, i == 1, py, qy, j == 1, quad);
  if (segment_distance(px, py) < quad.near_factor * scale)
    return composite_integral(px, qx, py, qy, quad.near_subdivisions, quad.far_points);
  return composite_integral(px, qx, py, qy, 1, quad.far_points);
}

Eigen::MatrixXd assemble_kernel_galerkin(const GreenKernel& kernel, const BoundarySpace& space,
                                         const KernelQuadrature& quad) {
  const int n = space.n_h();
  Eigen::MatrixXd v(n, n);
  for (int m = 0; m < n; ++m) {
    const Segment pm = space.mesh.panel(space.panel_of(m));
    for (int l = m; l < n; ++l) {
      const Segment pl = space.mesh.panel(space.panel_of(l));
      double value = log_panel_integral(pm, space.order_of(m), pl, space.order_of(l), quad);
      if (kernel.kind != KernelKind::FullSpace)
        value += regular_integral(kernel, pm, space.order_of(m), pl, space.order_of(l), quad.far_points);
      v(m, l) = value;
      v(l, m) = value;
    }
  }
  return v;
}

}  // namespace kfbem
