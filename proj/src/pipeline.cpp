#include "kfbem/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <numbers>

#include "kfbem/error.hpp"
#include "kfbem/hash.hpp"
#include "kfbem/serialization.hpp"

namespace kfbem {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool ring_domain(const DomainSpec& d) { return d.kind != DomainSpec::Kind::Rectangle; }

std::vector<Point2> corner_list(const InterfaceSpec& s) {
  std::vector<Point2> pts = s.points;
  if (s.closed) pts.push_back(s.points.front());
  return pts;
}

InterfaceMesh polyline_with_counts(const InterfaceSpec& s, const std::vector<int>& counts) {
  const auto corners = corner_list(s);
  std::vector<Point2> pts;
  for (std::size_t i = 0; i + 1 < corners.size(); ++i) {
    const Segment seg{corners[i], corners[i + 1]};
    for (int j = 0; j < counts[i]; ++j) pts.push_back(seg.at(static_cast<double>(j) / counts[i]));
  }
  if (!s.closed) pts.push_back(corners.back());
  return interface_from_points(std::move(pts), s.closed);
}

InterfaceMesh circle_interface(const InterfaceSpec& s, int panels) {
  std::vector<Point2> pts = regular_polygon(s.center, s.radius, panels);
  return interface_from_points(std::move(pts), true);
}

int circle_panels(const InterfaceSpec& s, double h) {
  return std::max(3, static_cast<int>(std::ceil(2.0 * std::numbers::pi * s.radius / h - 1e-9)));
}

}  // namespace

Mesh2D build_level_mesh(const ProblemConfig& cfg, int level) {
  Mesh2D mesh;
  if (ring_domain(cfg.domain) && cfg.rings > 0) {
    mesh = build_ring_mesh(cfg.domain, cfg.rings << level);
  } else {
    mesh = build_structured_mesh(cfg.domain, cfg.d);
    if (mesh.rings > 0 && level > 0) {
      mesh = build_ring_mesh(cfg.domain, mesh.rings << level);
    } else {
      for (int i = 0; i < level; ++i) mesh = refine_uniform(mesh);
    }
  }
  for (int i = 0; i < cfg.refinements; ++i) mesh = refine_uniform(mesh);
  return mesh;
}

InterfaceMesh build_level_interface(const ProblemConfig& cfg, const Mesh2D& mesh, int level) {
  const InterfaceSpec& s = cfg.interface;
  switch (s.kind) {
    case InterfaceSpec::Kind::Embedded:
      if (s.loop >= static_cast<int>(mesh.embedded_loops.size()))
        throw Error(ErrorCode::DegenerateInterface, "mesh has no embedded loop " + std::to_string(s.loop));
      if (s.stride == 1) return interface_from_loop(mesh, s.loop);
      {
        const InterfaceMesh full = interface_from_loop(mesh, s.loop);
        if (full.points.size() % s.stride != 0)
          throw Error(ErrorCode::DegenerateInterface, "loop length is not a multiple of the panel stride");
        std::vector<Point2> pts;
        for (std::size_t i = 0; i < full.points.size(); i += s.stride) pts.push_back(full.points[i]);
        return interface_from_points(std::move(pts), true);
      }
    case InterfaceSpec::Kind::Circle:
      return circle_interface(s, circle_panels(s, cfg.h) << level);
    case InterfaceSpec::Kind::Polyline: {
      const auto corners = corner_list(s);
      std::vector<int> counts;
      for (std::size_t i = 0; i + 1 < corners.size(); ++i) {
        const double len = distance(corners[i], corners[i + 1]);
        if (len <= 0.0) throw Error(ErrorCode::DegenerateInterface, "repeated interface point");
        counts.push_back(std::max(1, static_cast<int>(std::ceil(len / cfg.h - 1e-9))) << level);
      }
      return polyline_with_counts(s, counts);
    }
  }
  throw Error(ErrorCode::DegenerateInterface, "unknown interface kind");
}

InterfaceMesh build_interface_with_panels(const ProblemConfig& cfg, int panels) {
  const InterfaceSpec& s = cfg.interface;
  if (s.kind == InterfaceSpec::Kind::Circle) return circle_interface(s, std::max(3, panels));
  if (s.kind != InterfaceSpec::Kind::Polyline)
    throw Error(ErrorCode::DegenerateInterface, "panel counts can only be prescribed for polyline or circle interfaces");
  const auto corners = corner_list(s);
  const int nseg = static_cast<int>(corners.size()) - 1;
  if (panels < nseg) throw Error(ErrorCode::DegenerateInterface, "fewer panels than interface segments");
  std::vector<double> len(nseg);
  double total = 0.0;
  for (int i = 0; i < nseg; ++i) total += len[i] = distance(corners[i], corners[i + 1]);
  // largest remainder, at least one panel per segment
  std::vector<int> counts(nseg);
  std::vector<std::pair<double, int>> rem;
  int used = 0;
  for (int i = 0; i < nseg; ++i) {
    const double exact = panels * len[i] / total;
    counts[i] = std::max(1, static_cast<int>(std::floor(exact)));
    used += counts[i];
    rem.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; used < panels; r = (r + 1) % rem.size(), ++used) ++counts[rem[r].second];
  for (std::size_t r = 0; used > panels; r = (r + 1) % rem.size()) {
    int& c = counts[rem[rem.size() - 1 - r].second];
    if (c > 1) {
      --c;
      --used;
    }
  }
  return polyline_with_counts(s, counts);
}

InterfaceMesh subdivide_interface(const InterfaceMesh& iface, int factor) {
  std::vector<Point2> pts;
  for (int l = 0; l < iface.num_panels(); ++l) {
    const Segment seg = iface.panel(l);
    for (int j = 0; j < factor; ++j) pts.push_back(seg.at(static_cast<double>(j) / factor));
  }
  if (!iface.closed) pts.push_back(iface.points.back());
  return interface_from_points(std::move(pts), iface.closed);
}

std::uint64_t volume_key(const Mesh2D& mesh, int p, const OperatorCoefficients& coeffs) {
  Fnv1a h;
  h.update_value(mesh.hash());
  h.update_value(p);
  h.update_string(coeffs.canonical());
  return h.digest();
}

namespace {

std::string cache_base(const ProblemConfig& cfg, std::uint64_t key) {
  return (std::filesystem::path(cfg.cache_dir) / ("volume-" + hex64(key))).string();
}

void assemble_volume(const ProblemConfig& cfg, VolumeStage& v) {
  const auto t0 = Clock::now();
  v.stiffness = assemble_stiffness(v.mesh, v.dofs, cfg.coefficients);
  v.seconds_assembly += seconds_since(t0);
}

}  // namespace

VolumeStage prepare_volume(const ProblemConfig& cfg, const Mesh2D& mesh, bool factorize,
                           std::vector<std::string>& warnings) {
  VolumeStage v;
  v.mesh = mesh;
  v.dofs = build_dofmap(v.mesh, cfg.p);
  v.key = volume_key(v.mesh, cfg.p, cfg.coefficients);
  const bool cached = !cfg.cache_dir.empty();
  std::string base;
  if (cached) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.cache_dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create cache directory " + cfg.cache_dir);
    base = cache_base(cfg, v.key);
    v.cache_file = base + ".kfbm";
    if (factorize && std::filesystem::exists(v.cache_file)) {
      try {
        v.factorization = std::make_shared<NewtonFactorization>(
            NewtonFactorization::load(v.cache_file, v.key, v.dofs.n_d));
        v.cache_hit = true;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::CacheCorrupt && e.code() != ErrorCode::CacheMismatch) throw;
        warnings.push_back(std::string("cache file ") + v.cache_file + " rejected (" + e.what() + "); recomputing");
      }
    }
  }
  if (!factorize || v.cache_hit) return v;

  assemble_volume(cfg, v);
  const auto t0 = Clock::now();
  v.factorization = std::make_shared<NewtonFactorization>(NewtonFactorization::factorize(v.stiffness->L));
  v.seconds_factorization = seconds_since(t0);
  if (cached) {
    v.factorization->save(v.cache_file, v.key);
    write_sparse(base + ".kfbs", v.stiffness->L);
    write_text(base + ".mesh.json", mesh_to_json(v.mesh).dump());
  }
  return v;
}

VolumeStage prepare_volume(const ProblemConfig& cfg, int level, std::vector<std::string>& warnings) {
  const auto t0 = Clock::now();
  Mesh2D mesh = build_level_mesh(cfg, level);
  const double t_mesh = seconds_since(t0);
  VolumeStage v = prepare_volume(cfg, mesh, !cfg.solver.surrogate, warnings);
  v.seconds_mesh = t_mesh;
  return v;
}

const StiffnessMatrix& ensure_stiffness(const ProblemConfig& cfg, VolumeStage& volume) {
  if (volume.stiffness) return *volume.stiffness;
  if (volume.cache_hit) {
    try {
      StiffnessMatrix s;
      s.L = read_sparse(cache_base(cfg, volume.key) + ".kfbs");
      s.n_d = static_cast<int>(s.L.rows());
      s.hermitian = cfg.coefficients.hermitian_form();
      if (s.n_d == volume.dofs.n_d) {
        volume.stiffness = std::move(s);
        return *volume.stiffness;
      }
    } catch (const Error&) {
    }
  }
  assemble_volume(cfg, volume);
  return *volume.stiffness;
}

BoundaryStage prepare_boundary(const ProblemConfig& cfg, const VolumeStage& volume, InterfaceMesh iface) {
  BoundaryStage b;
  b.space = make_boundary_space(std::move(iface), cfg.k);
  auto t0 = Clock::now();
  b.overlaps = compute_overlaps(volume.mesh, b.space.mesh);
  b.seconds_overlaps = seconds_since(t0);
  t0 = Clock::now();
  b.transfer = assemble_transfer(volume.mesh, volume.dofs, b.space, b.overlaps);
  b.seconds_transfer = seconds_since(t0);
  return b;
}

SolveStage solve_stage(const ProblemConfig& cfg, VolumeStage& volume, const BoundaryStage& boundary,
                       AssemblyPath path) {
  SolveStage s;
  s.rhs = assemble_rhs(boundary.space, [&](Point2 x) { return cfg.f(x); });
  auto t0 = Clock::now();
  if (!cfg.solver.surrogate) {
    if (!volume.factorization) throw Error(ErrorCode::SingularMatrix, "volume stage has no factorization");
    s.v = assemble_single_layer(*volume.factorization, boundary.transfer, path, &s.counters);
  } else {
    const StiffnessMatrix& st = ensure_stiffness(cfg, volume);
    t0 = Clock::now();
    SurrogateConfig sc;
    sc.tolerance = cfg.solver.eps;
    const RowMatrixXc rd = RowMatrixXc(boundary.transfer.r.toDense());
    const SparseRowC gram = assemble_h1_gram(volume.mesh, volume.dofs);
    const SurrogateSolveResult res = surrogate_solve_multi(st.L, sc, rd, gram);
    s.v = boundary.transfer.r.adjoint() * res.solution;
    s.kappa_bound = res.kappa_bound;
    s.eps_d = res.eps_d_estimate;
    s.surrogate = res.stats;
    s.counters.volume_solves = res.stats.solves;
  }
  s.seconds_assembly = seconds_since(t0);
  t0 = Clock::now();
  s.solution = solve_single_layer(s.v, s.rhs);
  s.seconds_solve = seconds_since(t0);
  s.coercivity = coercivity_proxy(s.v);
  return s;
}

PipelineRun run_pipeline(const ProblemConfig& cfg, int level) {
  PipelineRun run;
  run.level = level;
  run.warnings = cfg.warnings;
  run.volume = prepare_volume(cfg, level, run.warnings);
  run.boundary = prepare_boundary(cfg, run.volume, build_level_interface(cfg, run.volume.mesh, level));
  run.solve = solve_stage(cfg, run.volume, run.boundary);
  return run;
}

bool kernel_oracle_available(const ProblemConfig& cfg) {
  const auto& d = cfg.domain;
  return d.kind == DomainSpec::Kind::Disk && norm(d.center) == 0.0 && d.neumann_sides.empty() &&
         cfg.coefficients.canonical() == OperatorCoefficients::laplace().canonical();
}

GreenKernel norm_kernel(const ProblemConfig& cfg) {
  const auto& d = cfg.domain;
  if (d.kind == DomainSpec::Kind::Disk && norm(d.center) == 0.0 && d.neumann_sides.empty())
    return {KernelKind::Disk, d.radius};
  return {KernelKind::FullSpace, 1.0};
}

}  // namespace kfbem
