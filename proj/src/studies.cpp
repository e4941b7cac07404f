#include "kfbem/studies.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "kfbem/error.hpp"
#include "kfbem/json_util.hpp"
#include "kfbem/oracle.hpp"
#include "kfbem/serialization.hpp"

namespace kfbem {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> eoc(double coarse, double fine) {
  if (!(coarse > 0.0) || !(fine > 0.0)) return std::nullopt;
  return std::log2(coarse / fine);
}

json volume_timings(const VolumeStage& v) {
  return {{"mesh", v.seconds_mesh}, {"volume_assembly", v.seconds_assembly},
          {"factorization", v.seconds_factorization}};
}

Eigen::LLT<Eigen::MatrixXd> cholesky(const Eigen::MatrixXd& g) {
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::NonSPD, "norm inducer is not positive definite");
  return llt;
}

MatrixXc congruence(const MatrixXc& a, const Eigen::MatrixXd& g) {
  const MatrixXc l = cholesky(g).matrixL().toDenseMatrix().cast<cplx>();
  const MatrixXc x = l.triangularView<Eigen::Lower>().solve(a);
  return l.triangularView<Eigen::Lower>().solve(x.adjoint()).adjoint();
}

double spectral_norm(const MatrixXc& a) {
  if (a.size() == 0) return 0.0;
  return Eigen::BDCSVD<MatrixXc>(a).singularValues()(0);
}

// Least-squares slope of the errors over levels >= first.
std::optional<double> fitted_eoc(const std::vector<double>& err, int first) {
  std::vector<double> x, y;
  for (int i = first; i < static_cast<int>(err.size()); ++i) {
    if (!(err[i] > 0.0)) return std::nullopt;
    x.push_back(std::ldexp(1.0, -i));
    y.push_back(err[i]);
  }
  if (x.size() < 2) return std::nullopt;
  return loglog_slope(x, y);
}

struct LevelData {
  int level = 0;
  BoundarySpace space;
  VectorXc z;
  int n_d = 0;
  double d = 0.0;
  long long nnz_r = 0;
  long long volume_solves = 0;
  long long sigma = 0;
  double eps_d = 0.0;
  double coercivity = 0.0;
  json timings;
};

LevelData level_data(const PipelineRun& run) {
  LevelData ld;
  ld.level = run.level;
  ld.space = run.boundary.space;
  ld.z = run.solve.solution.z;
  ld.n_d = run.volume.dofs.n_d;
  ld.d = run.volume.mesh.d_max;
  ld.nnz_r = run.boundary.transfer.r.nonZeros();
  ld.volume_solves = run.solve.counters.volume_solves;
  ld.sigma = static_cast<long long>(run.boundary.transfer.sigma.size());
  ld.eps_d = run.solve.eps_d;
  ld.coercivity = run.solve.coercivity;
  ld.timings = volume_timings(run.volume);
  ld.timings["transfer"] = run.boundary.seconds_transfer;
  ld.timings["overlaps"] = run.boundary.seconds_overlaps;
  ld.timings["single_layer_assembly"] = run.solve.seconds_assembly;
  ld.timings["boundary_solve"] = run.solve.seconds_solve;
  return ld;
}

void append_warnings(StudyReport& rep, const std::vector<std::string>& w) {
  for (const auto& s : w)
    if (std::find(rep.warnings.begin(), rep.warnings.end(), s) == rep.warnings.end()) rep.warnings.push_back(s);
}

}  // namespace

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log2(x[i]), ly = std::log2(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  return denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
}

double relative_operator_norm(const MatrixXc& e, const Eigen::MatrixXd& g) { return spectral_norm(congruence(e, g)); }

double relative_coercivity(const MatrixXc& a, const Eigen::MatrixXd& g) {
  const MatrixXc h = 0.5 * (a + a.adjoint());
  const MatrixXc m = congruence(h, g);
  const MatrixXc ms = 0.5 * (m + m.adjoint());
  if (ms.size() == 0) return 0.0;
  return Eigen::SelfAdjointEigenSolver<MatrixXc>(ms, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

StudyReport make_report(const std::string& kind, const ProblemConfig& cfg) {
  StudyReport rep;
  rep.kind = kind;
  rep.config = cfg.to_json();
  rep.config_hash = cfg.hash();
  rep.warnings = cfg.warnings;
  return rep;
}

StudyReport solve_report(const ProblemConfig& cfg, const PipelineRun& run) {
  StudyReport rep = make_report("solve", cfg);
  append_warnings(rep, run.warnings);
  const auto& space = run.boundary.space;
  const auto& sol = run.solve.solution;
  json panels = json::array();
  const int nb = space.degree + 1;
  for (int l = 0; l < space.mesh.num_panels(); ++l) {
    const Segment s = space.mesh.panel(l);
    json coeffs = json::array();
    for (int b = 0; b < nb; ++b) coeffs.push_back({sol.z[l * nb + b].real(), sol.z[l * nb + b].imag()});
    panels.push_back({{"panel", l}, {"a", {s.a.x, s.a.y}}, {"b", {s.b.x, s.b.y}}, {"legendre", coeffs}});
  }
  const auto& t = run.boundary.transfer;
  rep.results = {{"level", run.level},
                 {"d", run.volume.mesh.d_max},
                 {"h", space.mesh.h_max},
                 {"n_d", run.volume.dofs.n_d},
                 {"n_h", space.n_h()},
                 {"p", cfg.p},
                 {"k", space.degree},
                 {"solver", cfg.solver.text()},
                 {"relative_residual", sol.relative_residual},
                 {"condition_estimate", sol.condition_estimate},
                 {"ill_conditioned", sol.ill_conditioned},
                 {"coercivity_proxy", run.solve.coercivity},
                 {"nnz_r", t.r.nonZeros()},
                 {"c_r", t.c_r},
                 {"c_r_effective", t.c_r_effective},
                 {"sigma_size", t.sigma.size()},
                 {"volume_solves", run.solve.counters.volume_solves},
                 {"spmm_ops", run.solve.counters.spmm_ops},
                 {"kappa_bound", run.solve.kappa_bound},
                 {"eps_d", run.solve.eps_d},
                 {"z", complex_array(sol.z)},
                 {"panels", panels}};
  rep.timings = volume_timings(run.volume);
  rep.timings["cache_hit"] = run.volume.cache_hit;
  rep.timings["transfer"] = run.boundary.seconds_transfer;
  rep.timings["single_layer_assembly"] = run.solve.seconds_assembly;
  rep.timings["boundary_solve"] = run.solve.seconds_solve;
  Series s{"density", "arclength", "re_z", {}};
  double arc = 0.0;
  for (int l = 0; l < space.mesh.num_panels(); ++l) {
    const double len = space.mesh.panel(l).length();
    for (double tt : {0.0, 0.5, 1.0}) s.points.push_back({arc + tt * len, density_value(space, sol.z, l, tt).real()});
    arc += len;
  }
  rep.series.push_back(std::move(s));
  return rep;
}

StudyReport convergence_study(const ProblemConfig& cfg, int levels) {
  if (levels < 3) schema_error("/study/levels", "a convergence study needs at least 3 levels");
  StudyReport rep = make_report("convergence", cfg);
  const bool kernel_ok = kernel_oracle_available(cfg);
  if (cfg.study.oracle == "kernel" && !kernel_ok)
    schema_error("/study/oracle", "the kernel oracle needs Laplace on a Dirichlet disk centred at the origin");
  const bool use_kernel = cfg.study.oracle == "kernel" || (cfg.study.oracle == "auto" && kernel_ok);
  const int extra = cfg.study.oracle_extra;

  std::map<int, LevelData> data;
  auto get_level = [&](int level) -> const LevelData& {
    auto it = data.find(level);
    if (it == data.end()) {
      PipelineRun run = run_pipeline(cfg, level);
      append_warnings(rep, run.warnings);
      it = data.emplace(level, level_data(run)).first;
    }
    return it->second;
  };
  std::map<int, Eigen::MatrixXd> grams;

  std::vector<double> e_dual, e_l2;
  json rows = json::array();
  json timing_rows = json::array();
  Table table{"convergence",
              {"level", "d", "h", "n_d", "n_h", "error_dual", "error_l2proxy", "eoc_dual", "eoc_l2proxy", "nnz_r",
               "volume_solves", "eps_d"},
              {}};
  for (int level = 0; level < levels; ++level) {
    const LevelData& ld = get_level(level);
    double ed = 0.0, el = 0.0;
    if (use_kernel) {
      const KernelReference ref =
          kernel_reference(cfg, ld.space.mesh, cfg.study.reference_subdivision, std::max(cfg.k, 1));
      const VectorXc e = prolong_density(ld.space, ref.space, ld.z) - ref.z;
      ed = dual_norm(ref.v, e);
      el = l2_proxy_norm(ref.space, e);
    } else {
      const int ol = level + extra;
      const LevelData& od = get_level(ol);
      auto g = grams.find(ol);
      if (g == grams.end()) g = grams.emplace(ol, assemble_kernel_galerkin(norm_kernel(cfg), od.space)).first;
      const VectorXc e = prolong_density(ld.space, od.space, ld.z) - od.z;
      ed = dual_norm(g->second, e);
      el = l2_proxy_norm(od.space, e);
    }
    e_dual.push_back(ed);
    e_l2.push_back(el);
    std::optional<double> eo_d, eo_l;
    if (level > 0) {
      eo_d = eoc(e_dual[level - 1], ed);
      eo_l = eoc(e_l2[level - 1], el);
    }
    json row = {{"level", level},
                {"d", ld.d},
                {"h", ld.space.mesh.h_max},
                {"n_d", ld.n_d},
                {"n_h", ld.space.n_h()},
                {"error_dual", ed},
                {"error_l2proxy", el},
                {"eoc_dual", nullable(eo_d)},
                {"eoc_l2proxy", nullable(eo_l)},
                {"nnz_r", ld.nnz_r},
                {"volume_solves", ld.volume_solves},
                {"eps_d", ld.eps_d}};
    table.rows.push_back({row["level"], row["d"], row["h"], row["n_d"], row["n_h"], row["error_dual"],
                          row["error_l2proxy"], row["eoc_dual"], row["eoc_l2proxy"], row["nnz_r"],
                          row["volume_solves"], row["eps_d"]});
    rows.push_back(row);
    json tr = ld.timings;
    tr["level"] = level;
    timing_rows.push_back(tr);
  }
  rep.results["oracle"] = use_kernel ? "kernel" : "fem";
  if (!use_kernel) rep.results["oracle_extra"] = extra;
  rep.results["levels"] = rows;
  rep.results["fitted_eoc_dual"] = nullable(fitted_eoc(e_dual, 1));
  rep.results["fitted_eoc_l2proxy"] = nullable(fitted_eoc(e_l2, 1));
  rep.timings["levels"] = timing_rows;
  rep.tables.push_back(std::move(table));
  Series s{"error_dual", "h", "error_dual", {}};
  for (std::size_t i = 0; i < rows.size(); ++i) s.points.push_back({rows[i]["h"].get<double>(), e_dual[i]});
  rep.series.push_back(std::move(s));
  return rep;
}

StudyReport consistency_study(const ProblemConfig& cfg, int levels) {
  if (levels < 2) schema_error("/study/levels", "a consistency study needs at least 2 levels");
  StudyReport rep = make_report("consistency", cfg);
  const Mesh2D mesh0 = build_level_mesh(cfg, 0);
  const BoundarySpace space = make_boundary_space(build_level_interface(cfg, mesh0, 0), cfg.k);
  const Eigen::MatrixXd gram = assemble_kernel_galerkin(norm_kernel(cfg), space);
  const double h = space.mesh.h_max;

  auto single_layer_on = [&](const ProblemConfig& c, const Mesh2D& mesh, VolumeStage* keep) {
    std::vector<std::string> w;
    VolumeStage vol = prepare_volume(c, mesh, true, w);
    append_warnings(rep, w);
    const BoundaryStage b = prepare_boundary(c, vol, space.mesh);
    MatrixXc v = assemble_single_layer(*vol.factorization, b.transfer);
    if (keep) *keep = std::move(vol);
    return v;
  };

  ProblemConfig exact = cfg;
  exact.solver = SolverSpec{};
  MatrixXc v_ref;
  const bool kernel_ok = kernel_oracle_available(cfg);
  if (kernel_ok) {
    v_ref = gram.cast<cplx>();
  } else {
    const int ol = levels - 1 + cfg.study.oracle_extra;
    v_ref = single_layer_on(exact, build_level_mesh(exact, ol), nullptr);
  }
  rep.results["reference"] = kernel_ok ? "kernel" : "fem";
  rep.results["h"] = h;
  rep.results["n_h"] = space.n_h();

  json rows = json::array();
  json timing_rows = json::array();
  Table table{"consistency", {"level", "d", "h", "d_over_h", "n_d", "eps_con", "coercivity", "coercivity_relative"}, {}};
  std::vector<double> eps;
  bool positive_when_resolved = true;
  for (int level = 0; level < levels; ++level) {
    const auto t0 = Clock::now();
    VolumeStage vol;
    const MatrixXc v = single_layer_on(exact, build_level_mesh(exact, level), &vol);
    const double e = relative_operator_norm(v_ref - v, gram);
    const double c = coercivity_proxy(v);
    const double cr = relative_coercivity(v, gram);
    eps.push_back(e);
    const double d = vol.mesh.d_max;
    if (d <= h && !(c > 0.0)) positive_when_resolved = false;
    json row = {{"level", level},     {"d", d},           {"h", h}, {"d_over_h", d / h}, {"n_d", vol.dofs.n_d},
                {"eps_con", e}, {"coercivity", c}, {"coercivity_relative", cr}};
    table.rows.push_back({level, d, h, d / h, vol.dofs.n_d, e, c, cr});
    rows.push_back(row);
    timing_rows.push_back({{"level", level}, {"seconds", seconds_since(t0)}});
  }
  bool monotone = true;
  json ratios = json::array();
  for (std::size_t i = 1; i < eps.size(); ++i) {
    monotone = monotone && eps[i] < eps[i - 1];
    ratios.push_back(eps[i] > 0.0 ? eps[i - 1] / eps[i] : 0.0);
  }
  rep.results["levels"] = rows;
  rep.results["decay_ratios"] = ratios;
  rep.results["monotone"] = monotone;
  rep.results["positive_when_d_le_h"] = positive_when_resolved;

  json stress = json::array();
  Table st{"coarse_volume", {"d_over_h_target", "d", "n_d", "coercivity", "coercivity_relative"}, {}};
  std::optional<double> threshold;
  for (double factor : {1.0, 2.0, 4.0, 8.0}) {
    ProblemConfig c = exact;
    c.rings = 0;
    c.d = factor * h;
    VolumeStage vol;
    const MatrixXc v = single_layer_on(c, build_level_mesh(c, 0), &vol);
    const double cp = coercivity_proxy(v);
    const double cr = relative_coercivity(v, gram);
    if (!threshold && !(cr > 1e-10)) threshold = factor;
    stress.push_back({{"d_over_h_target", factor},
                      {"d", vol.mesh.d_max},
                      {"n_d", vol.dofs.n_d},
                      {"coercivity", cp},
                      {"coercivity_relative", cr}});
    st.rows.push_back({factor, vol.mesh.d_max, vol.dofs.n_d, cp, cr});
  }
  rep.results["coarse_volume"] = stress;
  rep.results["loss_of_coercivity_d_over_h"] = nullable(threshold);
  rep.timings["levels"] = timing_rows;
  rep.tables.push_back(std::move(table));
  rep.tables.push_back(std::move(st));
  Series s{"eps_con", "d", "eps_con", {}};
  for (const auto& r : rows) s.points.push_back({r["d"].get<double>(), r["eps_con"].get<double>()});
  rep.series.push_back(std::move(s));
  return rep;
}

StudyReport complexity_study(const ProblemConfig& cfg, const std::vector<int>& sizes) {
  if (sizes.size() < 4) schema_error("/study/sizes", "a complexity study needs at least 4 sizes");
  StudyReport rep = make_report("complexity", cfg);
  ProblemConfig exact = cfg;
  exact.solver = SolverSpec{};
  exact.rings = 0;
  json rows = json::array();
  json timing_rows = json::array();
  std::vector<double> xs, ts;
  Table table{"complexity",
              {"n_h", "n_d", "d", "h", "nnz_r", "c_r", "c_r_effective", "sigma_size", "spmm_ops", "model_ops",
               "ops_over_model", "nnz_within_bound"},
              {}};
  bool nnz_ok = true;
  double worst = 1.0;
  for (int n_h : sizes) {
    if (n_h % (cfg.k + 1) != 0) schema_error("/study/sizes", "sizes must be multiples of k + 1");
    const InterfaceMesh iface = build_interface_with_panels(exact, n_h / (cfg.k + 1));
    exact.h = iface.h_max;
    exact.d = exact.coupling * iface.h_max;
    std::vector<std::string> w;
    VolumeStage vol = prepare_volume(exact, build_level_mesh(exact, 0), true, w);
    append_warnings(rep, w);
    const BoundaryStage b = prepare_boundary(exact, vol, iface);
    const TransferMatrix& t = b.transfer;

    const auto t_inv = Clock::now();
    const RowMatrixXc n_sigma = restricted_inverse(*vol.factorization, t.sigma);
    const double seconds_inverse = seconds_since(t_inv);

    AssemblyCounters counters;
    single_layer_from_restricted(n_sigma, t, &counters);
    double best = 1e300;
    double total = 0.0;
    int reps = 0;
    while (reps < 3 || (total < 0.3 && reps < 1000)) {
      const auto t0 = Clock::now();
      const MatrixXc v = single_layer_from_restricted(n_sigma, t);
      const double s = seconds_since(t0);
      best = std::min(best, s);
      total += s;
      ++reps;
    }
    const double model = static_cast<double>(t.c_r_effective) * t.c_r_effective * double(n_h) * n_h;
    const double ratio = static_cast<double>(counters.spmm_ops) / model;
    worst = std::max(worst, std::max(ratio, 1.0 / ratio));
    const bool bound = t.r.nonZeros() <= static_cast<long long>(t.c_r) * n_h;
    nnz_ok = nnz_ok && bound;
    json row = {{"n_h", n_h},
                {"n_d", vol.dofs.n_d},
                {"d", vol.mesh.d_max},
                {"h", iface.h_max},
                {"nnz_r", t.r.nonZeros()},
                {"c_r", t.c_r},
                {"c_r_effective", t.c_r_effective},
                {"sigma_size", t.sigma.size()},
                {"spmm_ops", counters.spmm_ops},
                {"model_ops", model},
                {"ops_over_model", ratio},
                {"nnz_within_bound", bound}};
    table.rows.push_back({n_h, vol.dofs.n_d, vol.mesh.d_max, iface.h_max, t.r.nonZeros(), t.c_r, t.c_r_effective,
                          t.sigma.size(), counters.spmm_ops, model, ratio, bound});
    rows.push_back(row);
    timing_rows.push_back({{"n_h", n_h},
                           {"assembly_seconds", best},
                           {"repetitions", reps},
                           {"restricted_inverse_seconds", seconds_inverse},
                           {"factorization_seconds", vol.seconds_factorization}});
    xs.push_back(n_h);
    ts.push_back(best);
  }
  rep.results["sizes"] = rows;
  rep.results["nnz_within_bound"] = nnz_ok;
  rep.results["max_model_deviation"] = worst;
  rep.timings["sizes"] = timing_rows;
  rep.timings["slope"] = loglog_slope(xs, ts);
  Table tt{"complexity_timings", {"n_h", "assembly_seconds"}, {}};
  Series s{"assembly_time", "n_h", "seconds", {}};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    tt.rows.push_back({xs[i], ts[i]});
    s.points.push_back({xs[i], ts[i]});
  }
  rep.tables.push_back(std::move(table));
  rep.tables.push_back(std::move(tt));
  rep.series.push_back(std::move(s));
  return rep;
}

StudyReport validate_kernel_study(const ProblemConfig& cfg, int levels) {
  if (!kernel_oracle_available(cfg))
    schema_error("/domain", "kernel validation needs Laplace on a Dirichlet disk centred at the origin");
  StudyReport rep = make_report("validate-kernel", cfg);
  ProblemConfig exact = cfg;
  exact.solver = SolverSpec{};
  json rows = json::array();
  json timing_rows = json::array();
  Table table{"kernel_equivalence", {"level", "d", "h", "n_h", "relative_difference", "reduction", "kernel_min_eig"}, {}};
  std::optional<double> prev;
  bool reduces = true;
  for (int level = 0; level < levels; ++level) {
    PipelineRun run = run_pipeline(exact, level);
    append_warnings(rep, run.warnings);
    const auto t0 = Clock::now();
    const Eigen::MatrixXd vk = assemble_kernel_galerkin(norm_kernel(cfg), run.boundary.space);
    const double t_kernel = seconds_since(t0);
    const MatrixXc diff = run.solve.v - vk.cast<cplx>();
    const double rel = spectral_norm(diff) / spectral_norm(vk.cast<cplx>());
    const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(vk, Eigen::EigenvaluesOnly).eigenvalues()(0);
    std::optional<double> red;
    if (prev) {
      red = *prev / rel;
      reduces = reduces && *red >= 1.5;
    }
    prev = rel;
    json row = {{"level", level},
                {"d", run.volume.mesh.d_max},
                {"h", run.boundary.space.mesh.h_max},
                {"n_h", run.boundary.space.n_h()},
                {"relative_difference", rel},
                {"reduction", nullable(red)},
                {"kernel_min_eig", min_eig}};
    table.rows.push_back({level, row["d"], row["h"], row["n_h"], rel, row["reduction"], min_eig});
    rows.push_back(row);
    json tr = volume_timings(run.volume);
    tr["level"] = level;
    tr["single_layer_assembly"] = run.solve.seconds_assembly;
    tr["kernel_assembly"] = t_kernel;
    timing_rows.push_back(tr);
  }
  rep.results["levels"] = rows;
  rep.results["reduction_at_least_1.5"] = reduces;
  rep.timings["levels"] = timing_rows;
  rep.tables.push_back(std::move(table));
  return rep;
}

StudyReport coercivity_study(const ProblemConfig& cfg, int levels) {
  StudyReport rep = make_report("coercivity", cfg);
  json rows = json::array();
  bool all_positive = true;
  Table table{"coercivity", {"level", "d", "h", "n_d", "n_h", "coercivity"}, {}};
  for (int level = 0; level < levels; ++level) {
    PipelineRun run = run_pipeline(cfg, level);
    append_warnings(rep, run.warnings);
    const double c = run.solve.coercivity;
    all_positive = all_positive && c > 0.0;
    rows.push_back({{"level", level},
                    {"d", run.volume.mesh.d_max},
                    {"h", run.boundary.space.mesh.h_max},
                    {"n_d", run.volume.dofs.n_d},
                    {"n_h", run.boundary.space.n_h()},
                    {"coercivity", c}});
    table.rows.push_back({level, run.volume.mesh.d_max, run.boundary.space.mesh.h_max, run.volume.dofs.n_d,
                          run.boundary.space.n_h(), c});
  }
  rep.results["levels"] = rows;
  rep.results["all_positive"] = all_positive;
  rep.tables.push_back(std::move(table));
  return rep;
}

StudyReport jump_study(const ProblemConfig& cfg, int levels) {
  StudyReport rep = make_report("jump", cfg);
  ProblemConfig exact = cfg;
  exact.solver = SolverSpec{};
  json rows = json::array();
  Table table{"jump", {"level", "d", "h", "defect", "relative", "ratio"}, {}};
  std::optional<double> prev;
  double worst_ratio = 0.0;
  for (int level = 0; level < levels; ++level) {
    std::vector<std::string> w = cfg.warnings;
    VolumeStage vol = prepare_volume(exact, level, w);
    append_warnings(rep, w);
    const BoundaryStage b = prepare_boundary(exact, vol, build_level_interface(exact, vol.mesh, level));
    const VectorXc g = project_l2(b.space, [&](Point2 x) { return cfg.f(x); });
    const Eigen::MatrixXd gram = assemble_kernel_galerkin(norm_kernel(cfg), b.space);
    const JumpCheck jc = jump_relation_check(vol.mesh, vol.dofs, cfg.coefficients, b.space, b.overlaps,
                                             *vol.factorization, b.transfer, g, gram);
    std::optional<double> ratio;
    if (prev && *prev > 0.0) {
      ratio = jc.defect / *prev;
      worst_ratio = std::max(worst_ratio, *ratio);
    }
    prev = jc.defect;
    rows.push_back({{"level", level},
                    {"d", vol.mesh.d_max},
                    {"h", b.space.mesh.h_max},
                    {"defect", jc.defect},
                    {"relative", jc.relative},
                    {"ratio", nullable(ratio)}});
    table.rows.push_back({level, vol.mesh.d_max, b.space.mesh.h_max, jc.defect, jc.relative, nullable(ratio)});
  }
  rep.results["levels"] = rows;
  rep.results["max_ratio"] = worst_ratio;
  rep.tables.push_back(std::move(table));
  return rep;
}

StudyReport surrogate_study(const ProblemConfig& cfg, const std::vector<double>& tolerances) {
  StudyReport rep = make_report("surrogate", cfg);
  ProblemConfig exact = cfg;
  exact.solver = SolverSpec{};
  std::vector<std::string> w;
  VolumeStage vol = prepare_volume(exact, 0, w);
  append_warnings(rep, w);
  const BoundaryStage b = prepare_boundary(exact, vol, build_level_interface(exact, vol.mesh, 0));
  const SolveStage ref = solve_stage(exact, vol, b);
  const double zn = ref.solution.z.norm();
  json rows = json::array();
  json timing_rows = json::array();
  Table table{"surrogate", {"eps", "relative_error", "kappa_bound", "bound", "iterations"}, {}};
  bool within = true;
  bool monotone = true;
  std::optional<double> prev_err;
  std::vector<double> tol = tolerances;
  std::sort(tol.begin(), tol.end(), std::greater<>());
  for (double eps : tol) {
    ProblemConfig c = exact;
    c.solver.surrogate = true;
    c.solver.eps = eps;
    const SolveStage s = solve_stage(c, vol, b);
    const double err = zn > 0.0 ? (s.solution.z - ref.solution.z).norm() / zn : (s.solution.z - ref.solution.z).norm();
    const double bound = s.kappa_bound * eps;
    within = within && err <= bound;
    if (prev_err) monotone = monotone && err <= *prev_err;
    prev_err = err;
    rows.push_back({{"eps", eps},
                    {"relative_error", err},
                    {"kappa_bound", s.kappa_bound},
                    {"bound", bound},
                    {"iterations", s.surrogate.total_iterations}});
    table.rows.push_back({eps, err, s.kappa_bound, bound, s.surrogate.total_iterations});
    timing_rows.push_back({{"eps", eps}, {"single_layer_assembly", s.seconds_assembly}});
  }
  rep.results["n_d"] = vol.dofs.n_d;
  rep.results["n_h"] = b.space.n_h();
  rep.results["tolerances"] = rows;
  rep.results["within_bound"] = within;
  rep.results["monotone"] = monotone;
  rep.timings["tolerances"] = timing_rows;
  rep.tables.push_back(std::move(table));
  return rep;
}

}  // namespace kfbem
