#include <algorithm>
#include <cmath>

#include "kfbem/bem.hpp"
#include "kfbem/quadrature.hpp"

namespace kfbem {

TransferMatrix assemble_transfer(const Mesh2D& mesh, const DofMap& dofs, const BoundarySpace& space,
                                 const OverlapTable& overlaps) {
  TransferMatrix out;
  const int p = dofs.degree, k = space.degree, nl = dofs.local_size(), nb = k + 1;
  const int np = space.mesh.num_panels();
  const auto& rule = quad::gauss_for_degree(p + k + 2);
  std::vector<Eigen::Triplet<cplx, int>> trip;
  out.support.resize(np);
  ShapeValues sv;

  for (int l = 0; l < np; ++l) {
    const Segment seg = space.mesh.panel(l);
    const double len = seg.length();

    // overlap-table bound on the number of dofs that can touch this panel
    std::vector<int> touching;
    for (int t : overlaps.triangles[l]) {
      for (int a = 0; a < nl; ++a) {
        const int j = dofs.free_index[dofs.local[t][a]];
        if (j >= 0) touching.push_back(j);
      }
    }
    std::sort(touching.begin(), touching.end());
    touching.erase(std::unique(touching.begin(), touching.end()), touching.end());
    out.c_r = std::max(out.c_r, static_cast<int>(touching.size()));

    // entries, accumulated per free dof in a fixed order
    std::vector<std::pair<int, std::array<cplx, 2>>> col;
    auto slot = [&](int j) -> std::array<cplx, 2>& {
      for (auto& e : col)
        if (e.first == j) return e.second;
      col.push_back({j, {cplx(0.0), cplx(0.0)}});
      return col.back().second;
    };
    for (const ClipPiece& piece : panel_pieces(mesh, space.mesh, overlaps, l)) {
      const auto c = mesh.corners(piece.triangle);
      const auto gl = barycentric_gradients(c);
      const auto& loc = dofs.local[piece.triangle];
      const double dt = piece.t1 - piece.t0;
      // a dof belongs to N_Sigma(l) when its trace on the piece is not identically zero
      std::array<bool, 6> active{};
      for (int s = 0; s <= p; ++s) {
        const double t = piece.t0 + dt * s / p;
        eval_shape(p, barycentric(c, seg.at(t)), gl, sv);
        for (int a = 0; a < nl; ++a) active[a] = active[a] || std::abs(sv.value[a]) > 1e-12;
      }
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const double t = piece.t0 + dt * rule.nodes[q];
        eval_shape(p, barycentric(c, seg.at(t)), gl, sv);
        const double w = rule.weights[q] * dt * len;
        for (int a = 0; a < nl; ++a) {
          const int j = dofs.free_index[loc[a]];
          if (j < 0 || !active[a]) continue;
          auto& e = slot(j);
          for (int b = 0; b < nb; ++b) e[b] += w * sv.value[a] * legendre(b, 2.0 * t - 1.0);
          out.assembly_ops += nb;
        }
      }
    }
    std::sort(col.begin(), col.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    for (const auto& [j, vals] : col) {
      out.support[l].push_back(j);
      for (int b = 0; b < nb; ++b) trip.emplace_back(j, l * nb + b, vals[b]);
    }
    out.c_r_effective = std::max(out.c_r_effective, static_cast<int>(col.size()));
  }

  out.r.resize(dofs.n_d, space.n_h());
  out.r.setFromTriplets(trip.begin(), trip.end());
  out.r.makeCompressed();

  for (int j = 0; j < dofs.n_d; ++j) {
    if (out.r.outerIndexPtr()[j + 1] > out.r.outerIndexPtr()[j]) out.sigma.push_back(j);
  }
  out.r_sigma.resize(static_cast<Eigen::Index>(out.sigma.size()), space.n_h());
  std::vector<Eigen::Triplet<cplx, int>> rs;
  rs.reserve(out.r.nonZeros());
  for (int i = 0; i < static_cast<int>(out.sigma.size()); ++i) {
    for (SparseRowC::InnerIterator it(out.r, out.sigma[i]); it; ++it) rs.emplace_back(i, static_cast<int>(it.col()), it.value());
  }
  out.r_sigma.setFromTriplets(rs.begin(), rs.end());
  out.r_sigma.makeCompressed();

  const double h = space.mesh.h_max, d = mesh.d_max;
  out.c_ov = overlap_constant(overlaps, h, d);
  return out;
}

}  // namespace kfbem
