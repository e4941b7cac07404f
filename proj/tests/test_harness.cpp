#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "kfbem/error.hpp"
#include "kfbem/hash.hpp"
#include "kfbem/oracle.hpp"
#include "kfbem/serialization.hpp"
#include "kfbem/studies.hpp"

using namespace kfbem;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json small_square() {
  return json::parse(R"({
    "schema_version": 1,
    "interface": {"type": "polyline", "points": [[0.25, 0.25], [0.75, 0.25], [0.75, 0.75], [0.25, 0.75]]},
    "coefficients": {"preset": "LAPLACE"},
    "data": {"f": "1 + x1*x2"},
    "discretisation": {"d": 0.125, "h": 0.125}
  })");
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string schema_message(const json& j) {
  try {
    parse_config(j);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Schema);
    return e.what();
  }
  return "";
}

std::uint64_t file_hash(const fs::path& p) {
  const std::string s = read_text(p.string());
  return fnv1a(s.data(), s.size());
}

}  // namespace

TEST_CASE("minimal config gets defaults") {
  const ProblemConfig c = parse_config(json::parse(R"({
    "interface": {"type": "circle", "radius": 0.3, "center": [0.5, 0.5]},
    "coefficients": {"preset": "LAPLACE"}
  })"));
  CHECK(c.p == 1);
  CHECK(c.k == 0);
  CHECK_FALSE(c.solver.surrogate);
  CHECK(c.d == doctest::Approx(c.h * c.coupling));
  CHECK(c.f({0.3, 0.1}) == cplx(1.0));
  CHECK(c.warnings.empty());
}

TEST_CASE("config errors name the offending pointer") {
  json j = small_square();
  j.erase("coefficients");
  CHECK(schema_message(j).find("/coefficients") != std::string::npos);

  j = small_square();
  j["discretisation"]["q"] = 3;
  CHECK(schema_message(j).find("/discretisation/q") != std::string::npos);

  j = small_square();
  j["discretisation"]["p"] = 3;
  CHECK(schema_message(j).find("/discretisation/p") != std::string::npos);

  j = small_square();
  j["schema_version"] = 2;
  CHECK(schema_message(j).find("/schema_version") != std::string::npos);

  j = small_square();
  j["interface"] = {{"type", "embedded"}, {"loop", 3}};
  CHECK(schema_message(j).find("/interface/loop") != std::string::npos);

  j = small_square();
  j["data"]["f"] = "sin(";
  CHECK_THROWS_AS(parse_config(j), Error);
}

TEST_CASE("compatibility violation is a warning, not an error") {
  json j = small_square();
  j["discretisation"] = {{"d", 0.5}, {"h", 0.1}, {"c_cmp", 2}};
  const ProblemConfig c = parse_config(j);
  REQUIRE(c.warnings.size() == 1);
  CHECK(c.warnings[0].find("d") != std::string::npos);
}

TEST_CASE("solver spec") {
  CHECK_FALSE(SolverSpec::parse("exact").surrogate);
  const SolverSpec s = SolverSpec::parse("surrogate:1e-6");
  CHECK(s.surrogate);
  CHECK(s.eps == 1e-6);
  CHECK(SolverSpec::parse(s.text()).eps == 1e-6);
  CHECK_THROWS_AS(SolverSpec::parse("surrogate:2"), Error);
  CHECK_THROWS_AS(SolverSpec::parse("direct"), Error);
}

TEST_CASE("config canonical form round trips and hashes") {
  const ProblemConfig a = parse_config(small_square());
  const ProblemConfig b = parse_config(a.to_json());
  CHECK(a.to_json() == b.to_json());
  CHECK(a.hash() == b.hash());
  json j = small_square();
  j["data"]["f"] = "2";
  CHECK(parse_config(j).hash() != a.hash());
}

TEST_CASE("binary and json system export round trip") {
  MatrixXc v(2, 3);
  v << cplx(1, 2), cplx(-3, 0.5), cplx(0, 0), cplx(1e-300, -7), cplx(4, 4), cplx(0.1, 0.2);
  const fs::path dir = fresh_dir("kfbem_test_io");
  write_kfbv((dir / "v.kfbv").string(), v);
  CHECK(read_kfbv((dir / "v.kfbv").string()) == v);
  {
    std::ifstream in(dir / "v.kfbv", std::ios::binary);
    char magic[4];
    in.read(magic, 4);
    CHECK(std::string(magic, 4) == "KFBV");
    CHECK(fs::file_size(dir / "v.kfbv") == 4 + 4 + 8 + 8 + 6 * 16);
  }
  const MatrixXc sq = v.leftCols(2);
  const VectorXc rhs = VectorXc::Constant(2, cplx(1, -1));
  const SystemData d = system_from_json(json::parse(system_to_json(sq, rhs, rhs).dump()));
  CHECK(d.v == sq);
  CHECK(d.rhs == rhs);
  CHECK(system_to_json(sq, rhs, rhs)["V"].size() == 4);

  SparseRowC s(3, 3);
  s.insert(0, 1) = cplx(2, 3);
  s.insert(2, 2) = 1.0;
  s.makeCompressed();
  write_sparse((dir / "s.kfbs").string(), s);
  CHECK((read_sparse((dir / "s.kfbs").string()) - s).norm() == 0.0);
  CHECK_THROWS_AS(read_kfbv((dir / "missing").string()), Error);
  fs::remove_all(dir);
}

TEST_CASE("csv quoting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  Table t{"t", {"x", "note"}, {{1, "a,b"}, {2.5, "c"}}};
  CHECK(t.to_csv() == "x,note\r\n1,\"a,b\"\r\n2.5,c\r\n");
}

TEST_CASE("preprocessing cache is reused across interfaces") {
  const fs::path dir = fresh_dir("kfbem_test_cache");
  json j = small_square();
  j["cache_dir"] = dir.string();
  const ProblemConfig a = parse_config(j);
  j["interface"]["points"] = {{0.125, 0.25}, {0.875, 0.25}, {0.5, 0.875}};
  const ProblemConfig b = parse_config(j);

  std::vector<std::string> warnings;
  VolumeStage first = prepare_volume(a, 0, warnings);
  CHECK_FALSE(first.cache_hit);
  REQUIRE(fs::exists(first.cache_file));
  const auto hash_before = file_hash(first.cache_file);

  VolumeStage second = prepare_volume(b, 0, warnings);
  CHECK(second.cache_hit);
  CHECK(second.seconds_assembly == 0.0);
  CHECK(second.cache_file == first.cache_file);
  CHECK(file_hash(second.cache_file) == hash_before);
  CHECK(warnings.empty());

  const BoundaryStage bs = prepare_boundary(b, second, build_level_interface(b, second.mesh, 0));
  VolumeStage fresh = prepare_volume(b, 0, warnings);
  const SolveStage cached = solve_stage(b, second, bs);
  ProblemConfig nocache = b;
  nocache.cache_dir.clear();
  VolumeStage direct = prepare_volume(nocache, 0, warnings);
  const SolveStage exact = solve_stage(nocache, direct, bs);
  CHECK((cached.v - exact.v).norm() == 0.0);

  {
    std::fstream io(first.cache_file, std::ios::in | std::ios::out | std::ios::binary);
    io.seekp(40);
    io.put('\x7f');
  }
  VolumeStage repaired = prepare_volume(a, 0, warnings);
  CHECK_FALSE(repaired.cache_hit);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("CacheCorrupt") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("reports are deterministic apart from timings") {
  const ProblemConfig c = parse_config(small_square());
  const auto r1 = solve_report(c, run_pipeline(c, 0));
  const auto r2 = solve_report(c, run_pipeline(c, 0));
  CHECK(r1.to_json(false).dump() == r2.to_json(false).dump());
  const json j = r1.to_json();
  CHECK(j["schema_version"] == kReportSchemaVersion);
  CHECK(j["code_version"] == code_version());
  CHECK(j["config_hash"] == hex64(c.hash()));
  CHECK(j.contains("timings"));
  CHECK_FALSE(r1.to_json(false).contains("timings"));

  const fs::path dir = fresh_dir("kfbem_test_report");
  write_report(r1, dir.string());
  CHECK(fs::exists(dir / "report.json"));
  CHECK(json::parse(read_text((dir / "report.json").string()))["kind"] == r1.kind);
  fs::remove_all(dir);
}

TEST_CASE("zero data through the pipeline") {
  json j = small_square();
  j["data"]["f"] = 0;
  const ProblemConfig c = parse_config(j);
  CHECK(run_pipeline(c, 0).solve.solution.z.norm() == 0.0);
}

TEST_CASE("fem oracle with no extra refinement is the production solve") {
  const ProblemConfig c = parse_config(small_square());
  const PipelineRun run = run_pipeline(c, 1);
  const OracleResult o = fine_fem_oracle(c, 1, 0);
  CHECK(o.level == 1);
  CHECK((o.z - run.solve.solution.z).norm() == 0.0);
  CHECK_FALSE(o.richardson_estimate);
  CHECK_THROWS_AS(fine_fem_oracle(c, 1, 3, 100), Error);
}

TEST_CASE("surrogate with a tight tolerance reproduces the exact path") {
  json j = small_square();
  j["coefficients"] = {{"preset", "CONVECTION"}};
  const ProblemConfig exact = parse_config(j);
  j["solver"] = "surrogate:1e-10";
  const ProblemConfig sur = parse_config(j);
  const auto a = run_pipeline(exact, 1), b = run_pipeline(sur, 1);
  const VectorXc& za = a.solve.solution.z;
  CHECK((za - b.solve.solution.z).norm() <= 1e-7 * za.norm());
  CHECK(b.solve.kappa_bound > 0.0);
}

TEST_CASE("level interfaces are nested") {
  const ProblemConfig c = parse_config(small_square());
  const Mesh2D m0 = build_level_mesh(c, 0), m1 = build_level_mesh(c, 1);
  const InterfaceMesh i0 = build_level_interface(c, m0, 0), i1 = build_level_interface(c, m1, 1);
  REQUIRE(i1.points.size() == 2 * i0.points.size());
  for (std::size_t i = 0; i < i0.points.size(); ++i) CHECK(distance(i0.points[i], i1.points[2 * i]) < 1e-15);
  CHECK(m1.d_max == doctest::Approx(0.5 * m0.d_max));
}

TEST_CASE("study helpers") {
  CHECK(loglog_slope({1, 2, 4, 8}, {3, 12, 48, 192}) == doctest::Approx(2.0));
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(2, 2);
  g(1, 1) = 4.0;
  MatrixXc e = MatrixXc::Zero(2, 2);
  e(1, 1) = 2.0;
  CHECK(relative_operator_norm(e, g) == doctest::Approx(0.5));
  MatrixXc a = MatrixXc::Identity(2, 2);
  CHECK(relative_coercivity(a, g) == doctest::Approx(0.25));
}

TEST_CASE("small studies produce complete reports") {
  const ProblemConfig c = parse_config(small_square());
  const auto cons = consistency_study(c, 3);
  CHECK(cons.results.contains("monotone"));
  CHECK(cons.results["levels"].size() == 3);
  const auto coer = coercivity_study(c, 2);
  CHECK(coer.results["levels"].size() == 2);
  const auto jump = jump_study(c, 2);
  CHECK(jump.results["levels"].size() == 2);
  CHECK_THROWS_AS(convergence_study(c, 2), Error);
}
