#include "kfbem/coefficients.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>

#include "kfbem/error.hpp"
#include "kfbem/fem.hpp"
#include "kfbem/json_util.hpp"
#include "kfbem/quadrature.hpp"

namespace kfbem {

namespace {

std::string number_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Expression parse_at(const std::string& text, const std::string& pointer) {
  try {
    return Expression::parse(text);
  } catch (const Error& e) {
    throw Error(ErrorCode::Parse, pointer + ": " + e.what());
  }
}

Expression real_part(const nlohmann::json& j, const std::string& pointer) {
  if (j.is_number()) return Expression(j.get<double>());
  if (j.is_string()) return parse_at(j.get<std::string>(), pointer);
  schema_error(pointer, "expected a number or an expression string");
}

ComplexField field(const nlohmann::json& j, const std::string& pointer) {
  if (j.is_object()) {
    reject_unknown(j, pointer, {"re", "im"});
    ComplexField f;
    if (j.contains("re")) f.re = real_part(j["re"], pointer + "/re");
    if (j.contains("im")) f.im = real_part(j["im"], pointer + "/im");
    return f;
  }
  return ComplexField::real(real_part(j, pointer));
}

nlohmann::json field_json(const ComplexField& f) {
  if (f.is_real()) return f.re.text();
  return nlohmann::json{{"re", f.re.text()}, {"im", f.im.text()}};
}

const char* kVariableDiffusion = "1 + 0.5*sin(pi*x1)*sin(pi*x2)";

}  // namespace

bool ComplexField::is_zero() const {
  return re.is_constant() && im.is_constant() && re({0, 0}) == 0.0 && im({0, 0}) == 0.0;
}

bool ComplexField::is_real() const { return im.is_constant() && im({0, 0}) == 0.0; }

ComplexField ComplexField::constant(cplx v) { return {Expression(v.real()), Expression(v.imag())}; }

ComplexField ComplexField::real(Expression e) { return {std::move(e), Expression(0.0)}; }

std::string preset_name(Preset p) {
  switch (p) {
    case Preset::Laplace: return "LAPLACE";
    case Preset::VariableDiffusion: return "VARIABLE_DIFFUSION";
    case Preset::Convection: return "CONVECTION";
    case Preset::Robin: return "ROBIN";
  }
  return "LAPLACE";
}

std::optional<Preset> preset_from_name(std::string name) {
  for (char& ch : name) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  for (Preset p : {Preset::Laplace, Preset::VariableDiffusion, Preset::Convection, Preset::Robin}) {
    if (preset_name(p) == name) return p;
  }
  return std::nullopt;
}

OperatorCoefficients OperatorCoefficients::preset(Preset p) {
  OperatorCoefficients c;
  c.name_ = preset_name(p);
  switch (p) {
    case Preset::Laplace:
      break;
    case Preset::VariableDiffusion: {
      const auto a = ComplexField::real(Expression::parse(kVariableDiffusion));
      c.A_ = {a, ComplexField{}, ComplexField{}, a};
      c.a_min_ = 0.5;
      break;
    }
    case Preset::Convection:
      c.b_ = {ComplexField::constant(1.0), ComplexField::constant(0.5)};
      c.c_ = ComplexField::constant(2.0);
      break;
    case Preset::Robin:
      c.robin_r_ = 1.0;
      break;
  }
  return c;
}

OperatorCoefficients OperatorCoefficients::from_json(const nlohmann::json& j, const std::string& pointer) {
  reject_unknown(j, pointer, {"preset", "A", "b", "c", "robin_r", "a_min"});
  OperatorCoefficients c;
  c.name_ = "CUSTOM";
  if (j.contains("preset")) {
    const auto& v = j["preset"];
    const auto p = v.is_string() ? preset_from_name(v.get<std::string>()) : std::nullopt;
    if (!p) schema_error(pointer + "/preset", "unknown preset (LAPLACE, VARIABLE_DIFFUSION, CONVECTION, ROBIN)");
    c = preset(*p);
  }
  const bool custom = j.contains("A") || j.contains("b") || j.contains("c") || j.contains("robin_r");
  if (custom && j.contains("preset")) c.name_ += "+CUSTOM";
  if (j.contains("A")) {
    const auto& a = j["A"];
    const std::string ptr = pointer + "/A";
    if (a.is_string() && preset_from_name(a.get<std::string>())) {
      const auto p = preset(*preset_from_name(a.get<std::string>()));
      c.A_ = p.A_;
      c.a_min_ = p.a_min_;
    } else if (a.is_array()) {
      if (a.size() != 2 || !a[0].is_array() || !a[1].is_array() || a[0].size() != 2 || a[1].size() != 2) {
        schema_error(ptr, "expected a 2x2 array");
      }
      for (int r = 0; r < 2; ++r)
        for (int s = 0; s < 2; ++s)
          c.A_[2 * r + s] = field(a[r][s], ptr + "/" + std::to_string(r) + "/" + std::to_string(s));
    } else {
      const ComplexField d = field(a, ptr);
      c.A_ = {d, ComplexField{}, ComplexField{}, d};
    }
  }
  if (j.contains("b")) {
    const auto& b = j["b"];
    if (!b.is_array() || b.size() != 2) schema_error(pointer + "/b", "expected an array of two entries");
    c.b_ = {field(b[0], pointer + "/b/0"), field(b[1], pointer + "/b/1")};
  }
  if (j.contains("c")) c.c_ = field(j["c"], pointer + "/c");
  if (j.contains("robin_r")) {
    const auto& r = j["robin_r"];
    const std::string ptr = pointer + "/robin_r";
    if (r.is_null()) {
      c.robin_r_.reset();
    } else if (r.is_number()) {
      c.robin_r_ = r.get<double>();
    } else {
      reject_unknown(r, ptr, {"re", "im"});
      const double re = r.contains("re") ? require_number(r["re"], ptr + "/re") : 0.0;
      const double im = r.contains("im") ? require_number(r["im"], ptr + "/im") : 0.0;
      c.robin_r_ = cplx(re, im);
    }
  }
  if (j.contains("a_min")) c.a_min_ = require_number(j["a_min"], pointer + "/a_min");
  return c;
}

nlohmann::json OperatorCoefficients::to_json() const {
  nlohmann::json j;
  j["A"] = nlohmann::json::array({nlohmann::json::array({field_json(A_[0]), field_json(A_[1])}),
                                  nlohmann::json::array({field_json(A_[2]), field_json(A_[3])})});
  j["b"] = nlohmann::json::array({field_json(b_[0]), field_json(b_[1])});
  j["c"] = field_json(c_);
  if (robin_r_) j["robin_r"] = {{"re", robin_r_->real()}, {"im", robin_r_->imag()}};
  j["a_min"] = a_min_;
  return j;
}

CoefficientValues OperatorCoefficients::evaluate(Point2 x) const {
  CoefficientValues v;
  for (int i = 0; i < 4; ++i) v.A(i / 2, i % 2) = A_[i].is_zero() ? cplx(0.0) : A_[i](x);
  v.b[0] = b_[0].is_zero() ? cplx(0.0) : b_[0](x);
  v.b[1] = b_[1].is_zero() ? cplx(0.0) : b_[1](x);
  v.c = c_.is_zero() ? cplx(0.0) : c_(x);
  const double defect = (v.A - v.A.adjoint()).cwiseAbs().maxCoeff();
  if (defect > 1e-12) {
    throw Error(ErrorCode::NonHermitian, "A is not Hermitian at (" + number_text(x.x) + ", " +
                                             number_text(x.y) + "), defect " + number_text(defect));
  }
  return v;
}

bool OperatorCoefficients::has_convection() const { return !b_[0].is_zero() || !b_[1].is_zero(); }

bool OperatorCoefficients::hermitian_form() const {
  if (has_convection() || !c_.is_real()) return false;
  for (const auto& a : A_) {
    if (!a.is_real()) return false;
  }
  return !robin_r_ || robin_r_->imag() == 0.0;
}

std::string OperatorCoefficients::canonical() const { return to_json().dump(); }

EllipticityReport probe_ellipticity(const OperatorCoefficients& coeffs, const Mesh2D& mesh, int samples) {
  EllipticityReport rep;
  rep.a_min_observed = std::numeric_limits<double>::infinity();
  auto probe = [&](Point2 x) {
    const CoefficientValues v = coeffs.evaluate(x);
    rep.max_hermitian_defect = std::max(rep.max_hermitian_defect, (v.A - v.A.adjoint()).cwiseAbs().maxCoeff());
    // smallest eigenvalue of the Hermitian part gives min over xi of Re xi^H A xi / |xi|^2
    const double h11 = v.A(0, 0).real(), h22 = v.A(1, 1).real();
    const cplx h12 = 0.5 * (v.A(0, 1) + std::conj(v.A(1, 0)));
    const double lam = 0.5 * (h11 + h22) - std::sqrt(0.25 * (h11 - h22) * (h11 - h22) + std::norm(h12));
    rep.a_min_observed = std::min(rep.a_min_observed, lam);
    ++rep.samples;
  };
  const auto& rule = quad::triangle_rule(4);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto c = mesh.corners(t);
    for (const auto& l : rule.points) probe(c[0] * l[0] + c[1] * l[1] + c[2] * l[2]);
  }
  auto halton = [](int i, int base) {
    double f = 1.0, r = 0.0;
    for (int k = i; k > 0; k /= base) {
      f /= base;
      r += f * (k % base);
    }
    return r;
  };
  for (int i = 1; i <= samples; ++i) {
    const int t = static_cast<int>((static_cast<long long>(i) * 7919) % mesh.num_triangles());
    double u = halton(i, 2), w = halton(i, 3);
    if (u + w > 1.0) {
      u = 1.0 - u;
      w = 1.0 - w;
    }
    const auto c = mesh.corners(t);
    probe(c[0] + (c[1] - c[0]) * u + (c[2] - c[0]) * w);
  }
  rep.ok = rep.a_min_observed >= coeffs.a_min() - 1e-14 && rep.max_hermitian_defect <= 1e-12;
  return rep;
}

CoercivityReport check_coercivity_sample(const OperatorCoefficients& coeffs, const Mesh2D& mesh, int p,
                                         int max_dofs) {
  const DofMap dofs = build_dofmap(mesh, p);
  CoercivityReport rep;
  rep.n_d = dofs.n_d;
  if (dofs.n_d == 0) {
    rep.coercive = true;
    return rep;
  }
  if (dofs.n_d > max_dofs) {
    throw Error(ErrorCode::ResourceLimit, "coercivity sample needs n_d <= " + std::to_string(max_dofs));
  }
  const Eigen::MatrixXcd l = Eigen::MatrixXcd(assemble_stiffness(mesh, dofs, coeffs).L);
  const Eigen::MatrixXcd g = Eigen::MatrixXcd(assemble_h1_gram(mesh, dofs));
  const Eigen::MatrixXcd h = 0.5 * (l + l.adjoint());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, g);
  rep.min_real_rayleigh = es.eigenvalues().minCoeff();
  rep.min_abs_rayleigh = std::numeric_limits<double>::infinity();
  for (int i = 0; i < dofs.n_d; ++i) {
    const Eigen::VectorXcd v = es.eigenvectors().col(i);
    const double q = std::abs(v.dot(l * v)) / v.dot(g * v).real();
    rep.min_abs_rayleigh = std::min(rep.min_abs_rayleigh, q);
  }
  rep.coercive = rep.min_real_rayleigh > 0.0;
  return rep;
}

}  // namespace kfbem
