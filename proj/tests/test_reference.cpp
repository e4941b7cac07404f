#include <cmath>
#include <numbers>

#include "doctest.h"
#include "kfbem/error.hpp"
#include "kfbem/quadrature.hpp"
#include "kfbem/reference.hpp"

using namespace kfbem;

namespace {

constexpr double pi = std::numbers::pi;

// Closed-form inner integral of ln|x - y(t)| P_q(2t - 1) dt over a segment,
// q in {0, 1}, in arclength tau relative to the foot point of x.
double inner_exact(Point2 x, const Segment& s, int q) {
  const double len = s.length();
  const Point2 e = (s.b - s.a) / len;
  const double u = dot(x - s.a, e);
  const double h = std::abs(cross(e, x - s.a));
  auto f0 = [&](double tau) {
    const double r2 = tau * tau + h * h;
    double v = r2 > 0.0 ? 0.5 * tau * std::log(r2) - tau : 0.0;
    if (h > 0.0) v += h * std::atan(tau / h);
    return v;
  };
  auto f1 = [&](double tau) {
    const double r2 = tau * tau + h * h;
    return r2 > 0.0 ? 0.25 * (r2 * std::log(r2) - tau * tau) : 0.0;
  };
  const double a = -u, b = len - u;
  const double i0 = f0(b) - f0(a);
  if (q == 0) return i0;
  // P_1(2t - 1) = (2 (tau + u) / len) - 1
  const double i1 = f1(b) - f1(a);
  return 2.0 / len * (i1 + u * i0) - i0;
}

// Outer integral by a composite Gauss rule graded toward both ends and
// toward the points closest to the other panel.
double log_integral_oracle(const Segment& px, int qx, const Segment& py, int qy) {
  const auto& g = quad::gauss_legendre(12);
  std::vector<double> breaks{0.0, 1.0};
  for (int k = 1; k <= 30; ++k) {
    const double r = std::pow(0.6, k);
    breaks.push_back(r);
    breaks.push_back(1.0 - r);
  }
  for (int k = 1; k < 40; ++k) breaks.push_back(k / 40.0);
  std::sort(breaks.begin(), breaks.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    if (b - a < 1e-300) continue;
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double s = a + (b - a) * g.nodes[j];
      total += (b - a) * g.weights[j] * legendre(qx, 2 * s - 1) * inner_exact(px.at(s), py, qy);
    }
  }
  return -px.length() * total / (2 * pi);
}

}  // namespace

TEST_CASE("green kernels") {
  const GreenKernel full{KernelKind::FullSpace, 1.0};
  CHECK(full({0, 0}, {1, 0}) == doctest::Approx(0.0));
  CHECK(full({0, 0}, {std::exp(-1.0), 0}) == doctest::Approx(1 / (2 * pi)));
  CHECK_THROWS_AS(full({0.3, 0.3}, {0.3, 0.3}), Error);

  const GreenKernel disk{KernelKind::Disk, 2.0};
  const Point2 x{0.4, -0.7}, y{-1.1, 0.5};
  CHECK(disk(x, y) == doctest::Approx(disk(y, x)));
  // vanishes for y on the boundary circle
  for (double a : {0.0, 1.0, 2.5}) CHECK(std::abs(disk(x, {2 * std::cos(a), 2 * std::sin(a)})) < 1e-14);
  CHECK(disk(x, y) > 0.0);
  CHECK(disk.regular_part(x, y) == doctest::Approx(disk(x, y) - full(x, y)));
  CHECK(eval_kernel(disk, x, y) == disk(x, y));
}

TEST_CASE("panel log integrals against a closed-form inner integral") {
  const Segment a{{0.0, 0.0}, {0.3, 0.1}};
  struct Case {
    const char* name;
    Segment other;
  };
  const Case cases[] = {
      {"identical", a},
      {"reversed", {a.b, a.a}},
      {"touching collinear", {{0.3, 0.1}, {0.6, 0.2}}},
      {"touching at an angle", {{0.3, 0.1}, {0.35, 0.4}}},
      {"touching head to head", {{0.0, 0.4}, {0.3, 0.1}}},
      {"near", {{0.32, 0.02}, {0.5, -0.2}}},
      {"parallel near", {{0.0, 0.05}, {0.3, 0.15}}},
      {"far", {{2.0, 1.0}, {2.5, 1.3}}},
  };
  for (const auto& c : cases) {
    for (int qx = 0; qx <= 1; ++qx) {
      for (int qy = 0; qy <= 1; ++qy) {
        CAPTURE(c.name);
        CAPTURE(qx);
        CAPTURE(qy);
        const double ref = log_integral_oracle(a, qx, c.other, qy);
        const double got = log_panel_integral(a, qx, c.other, qy);
        CHECK(std::abs(got - ref) <= 1e-7 * (std::abs(ref) + 1e-3));
      }
    }
  }
}

TEST_CASE("identical panel integral has the known closed form") {
  const double len = 0.37;
  const Segment s{{0.1, 0.1}, {0.1 + len, 0.1}};
  CHECK(log_panel_integral(s, 0, s, 0) == doctest::Approx(-len * len * (std::log(len) - 1.5) / (2 * pi)).epsilon(1e-9));
}

TEST_CASE("disk kernel maps constants on a concentric circle to a constant") {
  const double rho = 0.5;
  const int n = 96;
  BoundarySpace space = make_boundary_space(interface_from_points(regular_polygon({0, 0}, rho, n), true), 0);
  const Eigen::MatrixXd v = assemble_kernel_galerkin(GreenKernel{KernelKind::Disk, 1.0}, space);
  CHECK((v - v.transpose()).norm() < 1e-14 * v.norm());
  const Eigen::VectorXd row_sums = v.rowwise().sum();
  const double len = space.mesh.panel(0).length();
  for (int m = 0; m < n; ++m) CHECK(row_sums[m] / len == doctest::Approx(-rho * std::log(rho)).epsilon(2e-3));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("kernel galerkin matrix entries match the panel integrals") {
  BoundarySpace space =
      make_boundary_space(interface_from_points({{0.2, 0.2}, {0.6, 0.25}, {0.5, 0.7}, {0.25, 0.6}}, true), 1);
  const Eigen::MatrixXd v = assemble_kernel_galerkin(GreenKernel{KernelKind::FullSpace, 1.0}, space);
  for (int m = 0; m < space.n_h(); ++m) {
    for (int l = 0; l < space.n_h(); ++l) {
      const double ref = log_integral_oracle(space.mesh.panel(space.panel_of(m)), space.order_of(m),
                                             space.mesh.panel(space.panel_of(l)), space.order_of(l));
      CHECK(v(m, l) == doctest::Approx(ref).epsilon(1e-7));
    }
  }
}
