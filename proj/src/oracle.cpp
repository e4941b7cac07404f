#include "kfbem/oracle.hpp"

#include "kfbem/error.hpp"

namespace kfbem {

namespace {

OracleResult from_run(const PipelineRun& run) {
  OracleResult r;
  r.level = run.level;
  r.space = run.boundary.space;
  r.z = run.solve.solution.z;
  r.trace = run.solve.v * r.z;
  return r;
}

PipelineRun guarded_run(const ProblemConfig& cfg, int level, int max_dofs) {
  const Mesh2D mesh = build_level_mesh(cfg, level);
  const DofMap dofs = build_dofmap(mesh, cfg.p);
  if (dofs.n_d > max_dofs)
    throw Error(ErrorCode::ResourceLimit, "oracle needs " + std::to_string(dofs.n_d) + " volume dofs, limit is " +
                                              std::to_string(max_dofs));
  return run_pipeline(cfg, level);
}

}  // namespace

OracleResult fine_fem_oracle(const ProblemConfig& cfg, int level, int extra, int max_dofs) {
  if (extra < 0) throw Error(ErrorCode::ResourceLimit, "negative oracle refinement");
  OracleResult r = from_run(guarded_run(cfg, level + extra, max_dofs));
  if (extra >= 1) {
    const OracleResult coarse = from_run(guarded_run(cfg, level + extra - 1, max_dofs));
    const VectorXc diff = prolong_density(coarse.space, r.space, coarse.z) - r.z;
    const double rate = std::ldexp(1.0, cfg.k + 1) - 1.0;
    r.richardson_estimate = l2_proxy_norm(r.space, diff) / rate;
  }
  return r;
}

KernelReference kernel_reference(const ProblemConfig& cfg, const InterfaceMesh& iface, int subdivision, int degree) {
  KernelReference ref;
  ref.space = make_boundary_space(subdivide_interface(iface, subdivision), degree);
  ref.v = assemble_kernel_galerkin(norm_kernel(cfg), ref.space);
  const VectorXc rhs = assemble_rhs(ref.space, [&](Point2 x) { return cfg.f(x); });
  const Eigen::LLT<Eigen::MatrixXd> llt(ref.v);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::NonSPD, "kernel Galerkin matrix is not positive definite");
  const Eigen::VectorXd re = llt.solve(rhs.real()), im = llt.solve(rhs.imag());
  ref.z = re.cast<cplx>() + cplx(0.0, 1.0) * im.cast<cplx>();
  return ref;
}

}  // namespace kfbem
