#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "kfbem/error.hpp"
#include "kfbem/hash.hpp"
#include "kfbem/pipeline.hpp"
#include "kfbem/serialization.hpp"
#include "kfbem/studies.hpp"

namespace fs = std::filesystem;
using namespace kfbem;

namespace {

struct Options {
  std::string config;
  std::string out = "kfbem-out";
  std::optional<int> levels;
  std::optional<unsigned> seed;
  std::optional<std::string> solver;
  bool quiet = false;
};

ProblemConfig load(const Options& o) {
  ProblemConfig cfg = load_config(o.config);
  if (o.seed) cfg.study.seed = *o.seed;
  if (o.solver) cfg.solver = SolverSpec::parse(*o.solver, "--solver");
  return cfg;
}

std::string default_cache(const ProblemConfig& cfg) { return cfg.cache_dir.empty() ? ".kfbem-cache" : cfg.cache_dir; }

std::string file_hash(const std::string& path) {
  const std::string bytes = read_text(path);
  return hex64(fnv1a(bytes.data(), bytes.size()));
}

void finish(const Options& o, const StudyReport& rep) {
  write_report(rep, o.out);
  if (o.quiet) return;
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << rep.kind << ": report written to " << (fs::path(o.out) / "report.json").string() << "\n";
  for (const auto& t : rep.tables) std::cout << "\n" << t.to_csv();
}

int cmd_preprocess(const Options& o) {
  ProblemConfig cfg = load(o);
  cfg.cache_dir = default_cache(cfg);
  std::vector<std::string> warnings = cfg.warnings;
  const VolumeStage vol = prepare_volume(cfg, build_level_mesh(cfg, 0), true, warnings);
  StudyReport rep = make_report("preprocess", cfg);
  rep.warnings = warnings;
  rep.results = {{"cache_file", vol.cache_file},
                 {"cache_file_hash", file_hash(vol.cache_file)},
                 {"volume_key", hex64(vol.key)},
                 {"n_d", vol.dofs.n_d},
                 {"d", vol.mesh.d_max},
                 {"triangles", vol.mesh.num_triangles()}};
  rep.timings = {{"cache_hit", vol.cache_hit},
                 {"mesh", vol.seconds_mesh},
                 {"volume_assembly", vol.seconds_assembly},
                 {"factorization", vol.seconds_factorization}};
  finish(o, rep);
  return 0;
}

int cmd_solve(const Options& o) {
  ProblemConfig cfg = load(o);
  cfg.cache_dir = default_cache(cfg);
  const PipelineRun run = run_pipeline(cfg, 0);
  const StudyReport rep = solve_report(cfg, run);
  finish(o, rep);
  write_text((fs::path(o.out) / "system.json").string(),
             system_to_json(run.solve.v, run.solve.rhs, run.solve.solution.z).dump() + "\n");
  write_kfbv((fs::path(o.out) / "V.kfbv").string(), run.solve.v);
  write_text((fs::path(o.out) / "mesh.json").string(), mesh_to_json(run.volume.mesh).dump() + "\n");
  write_text((fs::path(o.out) / "interface.json").string(),
             interface_to_json(run.boundary.space.mesh).dump() + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel-free boundary element toolkit"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Problem configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--levels", o.levels, "Number of refinement levels")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "Random seed");
    sub->add_option("--solver", o.solver, "exact | surrogate:<eps>");
    sub->add_flag("--quiet", o.quiet, "Suppress console output");
  };
  auto* pre = app.add_subcommand("preprocess", "Mesh, assemble and factorize the volume problem (cached)");
  auto* solve = app.add_subcommand("solve", "Assemble V_d^h and solve for the density");
  auto* conv = app.add_subcommand("convergence", "Coupled refinement study with EOC");
  auto* cons = app.add_subcommand("consistency", "Consistency error under volume refinement");
  auto* comp = app.add_subcommand("complexity", "Assembly cost against n_h");
  auto* val = app.add_subcommand("validate-kernel", "Compare V_d^h with the kernel Galerkin matrix");
  for (auto* s : {pre, solve, conv, cons, comp, val}) add_common(s);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*pre) return cmd_preprocess(o);
    if (*solve) return cmd_solve(o);
    ProblemConfig cfg = load(o);
    const int levels = o.levels.value_or(cfg.study.levels);
    if (*conv) finish(o, convergence_study(cfg, levels));
    if (*cons) finish(o, consistency_study(cfg, levels));
    if (*comp) {
      std::vector<int> sizes = cfg.study.sizes;
      if (sizes.empty()) sizes = {64, 128, 256, 512};
      finish(o, complexity_study(cfg, sizes));
    }
    if (*val) finish(o, validate_kernel_study(cfg, o.levels.value_or(2)));
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::Schema || e.code() == ErrorCode::Parse ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
