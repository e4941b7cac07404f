#include <cmath>

#include "doctest.h"
#include "kfbem/error.hpp"
#include "kfbem/quadrature.hpp"

using namespace kfbem;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// Exact integral of l1^a l2^b over the reference triangle divided by its area.
double simplex_moment(int a, int b) { return 2.0 * factorial(a) * factorial(b) / factorial(a + b + 2); }

}  // namespace

TEST_CASE("gauss-legendre integrates polynomials up to degree 2n-1") {
  for (int n = 1; n <= 12; ++n) {
    const auto& r = quad::gauss_legendre(n);
    REQUIRE(r.size() == static_cast<std::size_t>(n));
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      double s = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], deg);
      CHECK(s == doctest::Approx(1.0 / (deg + 1)).epsilon(1e-13));
    }
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], 2 * n);
    CHECK(std::abs(s - 1.0 / (2 * n + 1)) > 1e-15);
  }
}

TEST_CASE("gauss rule chosen by degree") {
  CHECK(quad::gauss_for_degree(0).size() == 1);
  CHECK(quad::gauss_for_degree(1).size() == 1);
  CHECK(quad::gauss_for_degree(2).size() == 2);
  CHECK(quad::gauss_for_degree(7).size() == 4);
}

TEST_CASE("graded rule resolves the logarithmic endpoint singularity") {
  const auto& g = quad::graded_toward_zero();
  double w = 0.0, lg = 0.0, lgt = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(g.nodes[i] > 0.0);
    CHECK(g.nodes[i] < 1.0);
    w += g.weights[i];
    lg += g.weights[i] * std::log(g.nodes[i]);
    lgt += g.weights[i] * g.nodes[i] * std::log(g.nodes[i]);
  }
  CHECK(w == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(lg == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(lgt == doctest::Approx(-0.25).epsilon(1e-10));
}

TEST_CASE("triangle rules integrate monomials exactly") {
  for (int degree : {0, 1, 2, 3, 4, 5, 6}) {
    const auto& r = quad::triangle_rule(degree);
    for (int a = 0; a <= degree; ++a) {
      for (int b = 0; a + b <= degree; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i)
          s += r.weights[i] * std::pow(r.points[i][1], a) * std::pow(r.points[i][2], b);
        CHECK(s == doctest::Approx(simplex_moment(a, b)).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("triangle rule points are barycentric") {
  const auto& r = quad::triangle_rule(6);
  for (const auto& p : r.points) {
    CHECK(p[0] + p[1] + p[2] == doctest::Approx(1.0).epsilon(1e-15));
    for (double l : p) CHECK(l >= 0.0);
  }
}

TEST_CASE("triangle rule beyond the tabulated degree is rejected") {
  CHECK_THROWS_AS(quad::triangle_rule(7), std::invalid_argument);
}
