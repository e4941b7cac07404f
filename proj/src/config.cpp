#include "kfbem/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "kfbem/error.hpp"
#include "kfbem/hash.hpp"
#include "kfbem/json_util.hpp"

namespace kfbem {

using nlohmann::json;

namespace {

Point2 parse_point(const json& j, const std::string& ptr) {
  if (!j.is_array() || j.size() != 2) schema_error(ptr, "expected [x, y]");
  return {require_number(j[0], ptr + "/0"), require_number(j[1], ptr + "/1")};
}

std::vector<Point2> parse_points(const json& j, const std::string& ptr, std::size_t min_count) {
  if (!j.is_array()) schema_error(ptr, "expected an array of points");
  if (j.size() < min_count) schema_error(ptr, "needs at least " + std::to_string(min_count) + " points");
  std::vector<Point2> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_point(j[i], ptr + "/" + std::to_string(i)));
  return out;
}

json point_json(Point2 p) { return json::array({p.x, p.y}); }

json points_json(const std::vector<Point2>& pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back(point_json(p));
  return a;
}

int require_int(const json& j, const std::string& ptr) {
  if (!j.is_number_integer()) schema_error(ptr, "expected an integer");
  return j.get<int>();
}

std::string require_string(const json& j, const std::string& ptr) {
  if (!j.is_string()) schema_error(ptr, "expected a string");
  return j.get<std::string>();
}

Expression parse_expression(const json& j, const std::string& ptr) {
  if (j.is_number()) return Expression(j.get<double>());
  if (!j.is_string()) schema_error(ptr, "expected a number or an expression string");
  try {
    return Expression::parse(j.get<std::string>());
  } catch (const Error& e) {
    schema_error(ptr, e.what());
  }
}

EmbeddedCurve parse_curve(const json& j, const std::string& ptr) {
  reject_unknown(j, ptr, {"type", "radius", "sides", "rotation", "points"});
  if (!j.contains("type")) schema_error(ptr + "/type", "missing");
  const std::string type = require_string(j["type"], ptr + "/type");
  EmbeddedCurve c;
  if (type == "circle") {
    c.kind = EmbeddedCurve::Kind::Circle;
  } else if (type == "regular_polygon") {
    c.kind = EmbeddedCurve::Kind::RegularPolygon;
    if (!j.contains("sides")) schema_error(ptr + "/sides", "missing");
    c.sides = require_int(j["sides"], ptr + "/sides");
    if (c.sides < 3) schema_error(ptr + "/sides", "needs at least 3 sides");
  } else if (type == "polygon") {
    c.kind = EmbeddedCurve::Kind::Polygon;
    if (!j.contains("points")) schema_error(ptr + "/points", "missing");
    c.points = parse_points(j["points"], ptr + "/points", 3);
  } else {
    schema_error(ptr + "/type", "unknown curve type '" + type + "'");
  }
  if (j.contains("radius")) c.radius = require_positive(j["radius"], ptr + "/radius");
  if (j.contains("rotation")) c.rotation = require_number(j["rotation"], ptr + "/rotation");
  return c;
}

json curve_json(const EmbeddedCurve& c) {
  json j;
  switch (c.kind) {
    case EmbeddedCurve::Kind::Circle:
      j["type"] = "circle";
      j["radius"] = c.radius;
      break;
    case EmbeddedCurve::Kind::RegularPolygon:
      j["type"] = "regular_polygon";
      j["radius"] = c.radius;
      j["sides"] = c.sides;
      j["rotation"] = c.rotation;
      break;
    case EmbeddedCurve::Kind::Polygon:
      j["type"] = "polygon";
      j["points"] = points_json(c.points);
      break;
  }
  return j;
}

DomainSpec parse_domain(const json& j, const std::string& ptr) {
  reject_unknown(j, ptr, {"type", "lo", "hi", "points", "center", "radius", "neumann_sides", "embedded"});
  if (!j.contains("type")) schema_error(ptr + "/type", "missing");
  const std::string type = require_string(j["type"], ptr + "/type");
  DomainSpec d;
  if (type == "rectangle") {
    d = DomainSpec::unit_square();
    if (j.contains("lo")) d.lo = parse_point(j["lo"], ptr + "/lo");
    if (j.contains("hi")) d.hi = parse_point(j["hi"], ptr + "/hi");
    if (!(d.hi.x > d.lo.x && d.hi.y > d.lo.y)) schema_error(ptr + "/hi", "must exceed lo in both coordinates");
  } else if (type == "polygon") {
    d.kind = DomainSpec::Kind::Polygon;
    if (!j.contains("points")) schema_error(ptr + "/points", "missing");
    d.polygon = parse_points(j["points"], ptr + "/points", 3);
  } else if (type == "disk") {
    d = DomainSpec::unit_disk();
    if (j.contains("center")) d.center = parse_point(j["center"], ptr + "/center");
    if (j.contains("radius")) d.radius = require_positive(j["radius"], ptr + "/radius");
  } else {
    schema_error(ptr + "/type", "unknown domain type '" + type + "'");
  }
  if (j.contains("neumann_sides")) {
    const auto& ns = j["neumann_sides"];
    if (!ns.is_array()) schema_error(ptr + "/neumann_sides", "expected an array");
    for (std::size_t i = 0; i < ns.size(); ++i)
      d.neumann_sides.push_back(require_int(ns[i], ptr + "/neumann_sides/" + std::to_string(i)));
  }
  if (j.contains("embedded")) {
    const auto& e = j["embedded"];
    if (!e.is_array()) schema_error(ptr + "/embedded", "expected an array");
    for (std::size_t i = 0; i < e.size(); ++i)
      d.embedded.push_back(parse_curve(e[i], ptr + "/embedded/" + std::to_string(i)));
  }
  return d;
}

json domain_json(const DomainSpec& d) {
  json j;
  switch (d.kind) {
    case DomainSpec::Kind::Rectangle:
      j["type"] = "rectangle";
      j["lo"] = point_json(d.lo);
      j["hi"] = point_json(d.hi);
      break;
    case DomainSpec::Kind::Polygon:
      j["type"] = "polygon";
      j["points"] = points_json(d.polygon);
      break;
    case DomainSpec::Kind::Disk:
      j["type"] = "disk";
      j["center"] = point_json(d.center);
      j["radius"] = d.radius;
      break;
  }
  j["neumann_sides"] = d.neumann_sides;
  json e = json::array();
  for (const auto& c : d.embedded) e.push_back(curve_json(c));
  j["embedded"] = e;
  return j;
}

InterfaceSpec parse_interface(const json& j, const std::string& ptr) {
  reject_unknown(j, ptr, {"type", "loop", "stride", "points", "closed", "center", "radius"});
  if (!j.contains("type")) schema_error(ptr + "/type", "missing");
  const std::string type = require_string(j["type"], ptr + "/type");
  InterfaceSpec s;
  if (type == "embedded") {
    s.kind = InterfaceSpec::Kind::Embedded;
    if (j.contains("loop")) s.loop = require_int(j["loop"], ptr + "/loop");
    if (s.loop < 0) schema_error(ptr + "/loop", "must be non-negative");
    if (j.contains("stride")) s.stride = require_int(j["stride"], ptr + "/stride");
    if (s.stride < 1) schema_error(ptr + "/stride", "must be positive");
  } else if (type == "polyline") {
    s.kind = InterfaceSpec::Kind::Polyline;
    if (j.contains("closed")) {
      if (!j["closed"].is_boolean()) schema_error(ptr + "/closed", "expected a boolean");
      s.closed = j["closed"].get<bool>();
    }
    if (!j.contains("points")) schema_error(ptr + "/points", "missing");
    s.points = parse_points(j["points"], ptr + "/points", s.closed ? 3 : 2);
  } else if (type == "circle") {
    s.kind = InterfaceSpec::Kind::Circle;
    if (j.contains("center")) s.center = parse_point(j["center"], ptr + "/center");
    if (j.contains("radius")) s.radius = require_positive(j["radius"], ptr + "/radius");
  } else {
    schema_error(ptr + "/type", "unknown interface type '" + type + "'");
  }
  return s;
}

json interface_json(const InterfaceSpec& s) {
  json j;
  switch (s.kind) {
    case InterfaceSpec::Kind::Embedded:
      j["type"] = "embedded";
      j["loop"] = s.loop;
      j["stride"] = s.stride;
      break;
    case InterfaceSpec::Kind::Polyline:
      j["type"] = "polyline";
      j["points"] = points_json(s.points);
      j["closed"] = s.closed;
      break;
    case InterfaceSpec::Kind::Circle:
      j["type"] = "circle";
      j["center"] = point_json(s.center);
      j["radius"] = s.radius;
      break;
  }
  return j;
}

}  // namespace

SolverSpec SolverSpec::parse(const std::string& text, const std::string& pointer) {
  SolverSpec s;
  if (text == "exact") return s;
  const std::string prefix = "surrogate:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string num = text.substr(prefix.size());
    std::size_t used = 0;
    double eps = 0.0;
    try {
      eps = std::stod(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != num.size() || !(eps > 0.0) || eps >= 1.0)
      schema_error(pointer, "surrogate tolerance must be a number in (0, 1)");
    s.surrogate = true;
    s.eps = eps;
    return s;
  }
  schema_error(pointer, "expected 'exact' or 'surrogate:<eps>'");
}

std::string SolverSpec::text() const {
  if (!surrogate) return "exact";
  char buf[64];
  std::snprintf(buf, sizeof buf, "surrogate:%.17g", eps);
  return buf;
}

double ProblemConfig::d_at(int level) const { return std::ldexp(d, -level); }
double ProblemConfig::h_at(int level) const { return std::ldexp(h, -level); }

json ProblemConfig::to_json() const {
  json j;
  j["domain"] = domain_json(domain);
  j["interface"] = interface_json(interface);
  j["coefficients"] = coefficients.to_json();
  j["data"] = {{"f", {{"re", f_re.text()}, {"im", f_im.text()}}}};
  json disc{{"p", p}, {"k", k}, {"d", d}, {"h", h}, {"coupling", coupling}, {"c_cmp", c_cmp}};
  if (rings > 0) disc["rings"] = rings;
  if (refinements > 0) disc["refinements"] = refinements;
  j["discretisation"] = disc;
  j["solver"] = solver.text();
  j["study"] = {{"levels", study.levels},
                {"seed", study.seed},
                {"sizes", study.sizes},
                {"oracle", study.oracle},
                {"oracle_extra", study.oracle_extra},
                {"reference_subdivision", study.reference_subdivision}};
  return j;
}

std::uint64_t ProblemConfig::hash() const {
  const std::string s = to_json().dump();
  return fnv1a(s.data(), s.size());
}

ProblemConfig parse_config(const json& j) {
  reject_unknown(j, "", {"schema_version", "domain", "interface", "coefficients", "data", "discretisation", "solver",
                         "study", "cache_dir"});
  ProblemConfig c;
  if (j.contains("schema_version") && require_int(j["schema_version"], "/schema_version") != 1)
    schema_error("/schema_version", "unsupported schema version");
  if (j.contains("domain")) c.domain = parse_domain(j["domain"], "/domain");
  if (!j.contains("interface")) schema_error("/interface", "missing required block");
  c.interface = parse_interface(j["interface"], "/interface");
  if (!j.contains("coefficients")) schema_error("/coefficients", "missing required block");
  c.coefficients = OperatorCoefficients::from_json(j["coefficients"], "/coefficients");

  if (j.contains("data")) {
    const auto& data = j["data"];
    reject_unknown(data, "/data", {"f"});
    if (data.contains("f")) {
      const auto& f = data["f"];
      if (f.is_object()) {
        reject_unknown(f, "/data/f", {"re", "im"});
        if (f.contains("re")) c.f_re = parse_expression(f["re"], "/data/f/re");
        if (f.contains("im")) c.f_im = parse_expression(f["im"], "/data/f/im");
      } else {
        c.f_re = parse_expression(f, "/data/f");
      }
    }
  }

  if (j.contains("discretisation")) {
    const auto& disc = j["discretisation"];
    const std::string ptr = "/discretisation";
    reject_unknown(disc, ptr, {"p", "k", "d", "h", "coupling", "c_cmp", "rings", "refinements"});
    if (disc.contains("p")) c.p = require_int(disc["p"], ptr + "/p");
    if (disc.contains("k")) c.k = require_int(disc["k"], ptr + "/k");
    if (c.p != 1 && c.p != 2) schema_error(ptr + "/p", "supported volume degrees are 1 and 2");
    if (c.k != 0 && c.k != 1) schema_error(ptr + "/k", "supported boundary degrees are 0 and 1");
    if (disc.contains("coupling")) c.coupling = require_positive(disc["coupling"], ptr + "/coupling");
    if (disc.contains("c_cmp")) c.c_cmp = require_positive(disc["c_cmp"], ptr + "/c_cmp");
    const bool has_d = disc.contains("d"), has_h = disc.contains("h");
    if (has_d) c.d = require_positive(disc["d"], ptr + "/d");
    if (has_h) c.h = require_positive(disc["h"], ptr + "/h");
    if (has_d && !has_h) c.h = c.d / c.coupling;
    if (has_h && !has_d) c.d = c.coupling * c.h;
    if (!has_d && !has_h) c.h = c.d / c.coupling;
    if (disc.contains("rings")) {
      c.rings = require_int(disc["rings"], ptr + "/rings");
      if (c.rings < 1) schema_error(ptr + "/rings", "must be positive");
    }
    if (disc.contains("refinements")) {
      c.refinements = require_int(disc["refinements"], ptr + "/refinements");
      if (c.refinements < 0) schema_error(ptr + "/refinements", "must be non-negative");
    }
  } else {
    c.h = c.d / c.coupling;
  }

  if (j.contains("solver")) c.solver = SolverSpec::parse(require_string(j["solver"], "/solver"));

  if (j.contains("study")) {
    const auto& s = j["study"];
    const std::string ptr = "/study";
    reject_unknown(s, ptr, {"levels", "seed", "sizes", "oracle", "oracle_extra", "reference_subdivision"});
    if (s.contains("levels")) c.study.levels = require_int(s["levels"], ptr + "/levels");
    if (c.study.levels < 1) schema_error(ptr + "/levels", "must be positive");
    if (s.contains("seed")) {
      if (!s["seed"].is_number_unsigned()) schema_error(ptr + "/seed", "expected a non-negative integer");
      c.study.seed = s["seed"].get<unsigned>();
    }
    if (s.contains("sizes")) {
      const auto& sz = s["sizes"];
      if (!sz.is_array()) schema_error(ptr + "/sizes", "expected an array");
      for (std::size_t i = 0; i < sz.size(); ++i) {
        const int v = require_int(sz[i], ptr + "/sizes/" + std::to_string(i));
        if (v < 1) schema_error(ptr + "/sizes/" + std::to_string(i), "must be positive");
        c.study.sizes.push_back(v);
      }
    }
    if (s.contains("oracle")) {
      c.study.oracle = require_string(s["oracle"], ptr + "/oracle");
      if (c.study.oracle != "auto" && c.study.oracle != "kernel" && c.study.oracle != "fem")
        schema_error(ptr + "/oracle", "expected 'auto', 'kernel' or 'fem'");
    }
    if (s.contains("oracle_extra")) {
      c.study.oracle_extra = require_int(s["oracle_extra"], ptr + "/oracle_extra");
      if (c.study.oracle_extra < 0) schema_error(ptr + "/oracle_extra", "must be non-negative");
    }
    if (s.contains("reference_subdivision")) {
      c.study.reference_subdivision = require_int(s["reference_subdivision"], ptr + "/reference_subdivision");
      if (c.study.reference_subdivision < 1) schema_error(ptr + "/reference_subdivision", "must be positive");
    }
  }
  if (j.contains("cache_dir")) c.cache_dir = require_string(j["cache_dir"], "/cache_dir");

  if (c.interface.kind == InterfaceSpec::Kind::Embedded &&
      c.interface.loop >= static_cast<int>(c.domain.embedded.size()))
    schema_error("/interface/loop", "no such embedded curve in /domain/embedded");
  if (c.d > c.c_cmp * c.h) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "d = %.4g exceeds c_cmp * h = %.4g; the compatibility condition is not met", c.d,
                  c.c_cmp * c.h);
    c.warnings.emplace_back(buf);
  }
  return c;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Parse, path + ": " + e.what());
  }
  return parse_config(j);
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace kfbem
