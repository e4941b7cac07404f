#include <string>

#include "kfbem/error.hpp"
#include "kfbem/fem.hpp"

namespace kfbem {

DofMap build_dofmap(const Mesh2D& mesh, int p) {
  if (p != 1 && p != 2) {
    throw Error(ErrorCode::UnsupportedDegree, "volume degree " + std::to_string(p) + " (supported: 1, 2)");
  }
  DofMap d;
  d.degree = p;
  const int nv = mesh.num_vertices();
  d.n_full = p == 1 ? nv : nv + mesh.num_edges();
  d.local.resize(mesh.triangles.size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    auto& loc = d.local[t];
    loc.fill(-1);
    for (int k = 0; k < 3; ++k) loc[k] = mesh.triangles[t][k];
    if (p == 2) {
      for (int k = 0; k < 3; ++k) loc[3 + k] = nv + mesh.triangle_edges[t][k];
    }
  }
  d.constrained.assign(d.n_full, 0);
  for (const auto& f : mesh.boundary) {
    if (f.marker != Marker::Dirichlet) continue;
    d.constrained[f.edge[0]] = 1;
    d.constrained[f.edge[1]] = 1;
    if (p == 2) d.constrained[nv + mesh.find_edge(f.edge[0], f.edge[1])] = 1;
  }
  d.free_index.assign(d.n_full, -1);
  for (int i = 0; i < d.n_full; ++i) {
    if (!d.constrained[i]) {
      d.free_index[i] = static_cast<int>(d.free_to_full.size());
      d.free_to_full.push_back(i);
    }
  }
  d.n_d = static_cast<int>(d.free_to_full.size());
  return d;
}

Point2 dof_point(const Mesh2D& mesh, const DofMap& dofs, int full) {
  const int nv = mesh.num_vertices();
  if (full < nv) return mesh.vertices[full];
  (void)dofs;
  const auto& e = mesh.edges[full - nv];
  return (mesh.vertices[e[0]] + mesh.vertices[e[1]]) * 0.5;
}

std::array<double, 3> barycentric(const std::array<Point2, 3>& tri, Point2 x) {
  const double a = cross(tri[1] - tri[0], tri[2] - tri[0]);
  const double l1 = cross(x - tri[0], tri[2] - tri[0]) / a;
  const double l2 = cross(tri[1] - tri[0], x - tri[0]) / a;
  return {1.0 - l1 - l2, l1, l2};
}

std::array<Point2, 3> barycentric_gradients(const std::array<Point2, 3>& tri) {
  const double two_area = cross(tri[1] - tri[0], tri[2] - tri[0]);
  std::array<Point2, 3> g;
  for (int i = 0; i < 3; ++i) {
    const Point2 a = tri[(i + 1) % 3], b = tri[(i + 2) % 3];
    g[i] = Point2{a.y - b.y, b.x - a.x} / two_area;
  }
  return g;
}

void eval_shape(int p, const std::array<double, 3>& l, const std::array<Point2, 3>& gl, ShapeValues& out) {
  if (p == 1) {
    for (int i = 0; i < 3; ++i) {
      out.value[i] = l[i];
      out.grad[i] = gl[i];
    }
    return;
  }
  for (int i = 0; i < 3; ++i) {
    out.value[i] = l[i] * (2.0 * l[i] - 1.0);
    out.grad[i] = gl[i] * (4.0 * l[i] - 1.0);
  }
  for (int k = 0; k < 3; ++k) {
    const int a = (k + 1) % 3, b = (k + 2) % 3;
    out.value[3 + k] = 4.0 * l[a] * l[b];
    out.grad[3 + k] = (gl[a] * l[b] + gl[b] * l[a]) * 4.0;
  }
}

VectorXc expand_free(const DofMap& dofs, const VectorXc& u_free) {
  VectorXc u = VectorXc::Zero(dofs.n_full);
  for (int i = 0; i < dofs.n_d; ++i) u[dofs.free_to_full[i]] = u_free[i];
  return u;
}

}  // namespace kfbem
