#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "kfbem/coefficients.hpp"
#include "kfbem/expression.hpp"
#include "kfbem/geometry.hpp"

namespace kfbem {

struct InterfaceSpec {
  enum class Kind { Embedded, Polyline, Circle };
  Kind kind = Kind::Polyline;
  int loop = 0;                 // Embedded: index into the mesh's embedded loops (by mean radius)
  int stride = 1;               // Embedded: loop edges per panel
  std::vector<Point2> points;   // Polyline
  bool closed = true;
  Point2 center{0.0, 0.0};      // Circle: inscribed regular polygon with about 2 pi r / h sides
  double radius = 0.5;
};

struct SolverSpec {
  bool surrogate = false;
  double eps = 0.0;

  static SolverSpec parse(const std::string& text, const std::string& pointer = "/solver");
  std::string text() const;
};

struct StudySpec {
  int levels = 4;
  unsigned seed = 1;
  std::vector<int> sizes;        // complexity study: boundary sizes n_h
  std::string oracle = "auto";   // auto | kernel | fem
  int oracle_extra = 2;
  int reference_subdivision = 4; // kernel oracle: sub-panels per panel
};

struct ProblemConfig {
  DomainSpec domain = DomainSpec::unit_square();
  InterfaceSpec interface;
  OperatorCoefficients coefficients;
  Expression f_re = Expression(1.0);
  Expression f_im = Expression(0.0);
  int p = 1;
  int k = 0;
  double d = 0.1;
  double h = 0.1;
  double coupling = 1.0;  // d = coupling * h under coupled refinement
  double c_cmp = 2.0;     // compatibility check d <= c_cmp * h
  int rings = 0;          // ring meshes: ring count at level 0 (0 = from d)
  int refinements = 0;    // uniform refinements applied after meshing
  SolverSpec solver;
  StudySpec study;
  std::string cache_dir;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
  std::uint64_t hash() const;
  cplx f(Point2 x) const { return {f_re(x), f_im(x)}; }
  double d_at(int level) const;
  double h_at(int level) const;
};

/// Validates and fills defaults; errors carry the JSON pointer of the
/// offending value. Only "coefficients" and "interface" are required.
ProblemConfig parse_config(const nlohmann::json& j);
ProblemConfig load_config(const std::string& path);

/// Hex rendering of a 64-bit hash.
std::string hex64(std::uint64_t v);

}  // namespace kfbem
