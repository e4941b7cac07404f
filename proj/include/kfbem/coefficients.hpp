#pragma once

#include <array>
#include <optional>
#include <string>

#include "json.hpp"

#include "kfbem/expression.hpp"
#include "kfbem/geometry.hpp"
#include "kfbem/types.hpp"

namespace kfbem {

/// Complex scalar field re(x) + i im(x).
struct ComplexField {
  Expression re{0.0};
  Expression im{0.0};

  cplx operator()(Point2 x) const { return {re(x), im(x)}; }
  bool is_zero() const;
  bool is_real() const;
  static ComplexField constant(cplx v);
  static ComplexField real(Expression e);
};

struct CoefficientValues {
  Eigen::Matrix2cd A;
  Eigen::Vector2cd b;
  cplx c;
};

enum class Preset { Laplace, VariableDiffusion, Convection, Robin };

std::string preset_name(Preset p);
/// Case-insensitive.
std::optional<Preset> preset_from_name(std::string name);

/// PDE data of -div(A grad u) + b.grad u + c u with Robin condition
/// A grad u . n = r u on Neumann faces.
class OperatorCoefficients {
 public:
  static OperatorCoefficients preset(Preset p);
  static OperatorCoefficients laplace() { return preset(Preset::Laplace); }

  /// Parses {"preset":..., "A": expr | preset name | [[e,e],[e,e]], "b":[e,e],
  /// "c": e, "robin_r": {"re":..,"im":..}, "a_min": number}. Unknown keys are
  /// rejected; `pointer` prefixes error paths.
  static OperatorCoefficients from_json(const nlohmann::json& j, const std::string& pointer = "/coefficients");
  nlohmann::json to_json() const;

  /// Throws NonHermitian if A(x) is not Hermitian to 1e-12.
  CoefficientValues evaluate(Point2 x) const;

  const std::string& name() const { return name_; }
  double a_min() const { return a_min_; }
  const std::optional<cplx>& robin_r() const { return robin_r_; }
  void set_robin_r(std::optional<cplx> r) { robin_r_ = r; }
  void set_c(ComplexField c) { c_ = std::move(c); }
  void set_b(ComplexField b1, ComplexField b2) { b_ = {std::move(b1), std::move(b2)}; }
  void set_a_min(double a) { a_min_ = a; }

  bool has_convection() const;
  /// b = 0 and A, c, r real: the stiffness matrix is Hermitian.
  bool hermitian_form() const;
  std::string canonical() const;

 private:
  std::string name_ = "LAPLACE";
  std::array<ComplexField, 4> A_{ComplexField::constant(1.0), ComplexField{}, ComplexField{},
                                 ComplexField::constant(1.0)};
  std::array<ComplexField, 2> b_{};
  ComplexField c_{};
  std::optional<cplx> robin_r_;
  double a_min_ = 1.0;
};

struct EllipticityReport {
  int samples = 0;
  double a_min_observed = 0.0;         // min over samples and probes of Re xi^H A xi / |xi|^2
  double max_hermitian_defect = 0.0;   // max ||A - A^H||
  bool ok = false;                     // observed >= claimed a_min and Hermitian
};

/// Samples A at quadrature nodes of every triangle plus `samples` quasi-random
/// points in the mesh.
EllipticityReport probe_ellipticity(const OperatorCoefficients& coeffs, const Mesh2D& mesh,
                                    int samples = 10000);

struct CoercivityReport {
  double min_real_rayleigh = 0.0;  // min Re of generalized eigenvalues of (L_d, M_d)
  double min_abs_rayleigh = 0.0;   // min |v^H L v| / v^H M v over the same eigenvectors
  bool coercive = false;
  int n_d = 0;
};

/// Smallest Rayleigh quotient of the Hermitian part of L_d against the H1 Gram
/// matrix M_d = K + M, by a dense generalized eigensolve (n_d up to max_dofs).
CoercivityReport check_coercivity_sample(const OperatorCoefficients& coeffs, const Mesh2D& mesh,
                                         int p = 1, int max_dofs = 2500);

}  // namespace kfbem
