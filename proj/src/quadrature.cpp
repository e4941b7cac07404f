#include "kfbem/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>
#include <utility>

namespace kfbem::quad {

namespace {

// Legendre P_n(x) and P_{n-1}(x) by the three-term recurrence.
std::pair<double, double> legendre_pair(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, p0};
}

Rule1D make_gauss_legendre(int n) {
  Rule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [pn, pm] = legendre_pair(n, x);
      const double dx = pn / (n * (x * pn - pm) / (x * x - 1.0));
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto [pn, pm] = legendre_pair(n, x);
    const double dp = n * (x * pn - pm) / (x * x - 1.0);
    rule.nodes[n - 1 - i] = 0.5 * (x + 1.0);
    rule.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

Rule1D make_graded(const GradedRuleParams& p) {
  const Rule1D& g = gauss_legendre(p.points_per_piece);
  Rule1D rule;
  std::vector<double> breaks{0.0};
  for (int k = p.levels; k >= 1; --k) breaks.push_back(std::pow(p.ratio, k));
  breaks.push_back(1.0);
  for (std::size_t piece = 0; piece + 1 < breaks.size(); ++piece) {
    const double lo = breaks[piece], hi = breaks[piece + 1];
    for (std::size_t q = 0; q < g.size(); ++q) {
      const double v = g.nodes[q];
      if (piece == 0) {
        rule.nodes.push_back(hi * v * v * v * v);
        rule.weights.push_back(g.weights[q] * hi * 4.0 * v * v * v);
      } else {
        rule.nodes.push_back(lo + (hi - lo) * v);
        rule.weights.push_back(g.weights[q] * (hi - lo));
      }
    }
  }
  return rule;
}

TriangleRule make_triangle_rule(int degree) {
  TriangleRule r;
  auto add3 = [&](double a, double w) {
    const double b = 1.0 - 2.0 * a;
    r.points.push_back({a, a, b});
    r.points.push_back({a, b, a});
    r.points.push_back({b, a, a});
    for (int i = 0; i < 3; ++i) r.weights.push_back(w);
  };
  auto add6 = [&](double a, double b, double w) {
    const double c = 1.0 - a - b;
    r.points.push_back({a, b, c});
    r.points.push_back({a, c, b});
    r.points.push_back({b, a, c});
    r.points.push_back({b, c, a});
    r.points.push_back({c, a, b});
    r.points.push_back({c, b, a});
    for (int i = 0; i < 6; ++i) r.weights.push_back(w);
  };
  if (degree <= 1) {
    r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    r.weights.push_back(1.0);
  } else if (degree == 2) {
    add3(1.0 / 6.0, 1.0 / 3.0);
  } else if (degree <= 4) {
    // Dunavant, 6 points
    add3(0.445948490915965, 0.223381589678011);
    add3(0.091576213509771, 0.109951743655322);
  } else if (degree <= 6) {
    // Dunavant, 12 points
    add3(0.249286745170910, 0.116786275726379);
    add3(0.063089014491502, 0.050844906370207);
    add6(0.053145049844817, 0.310352451033784, 0.082851075618374);
  } else {
    throw std::invalid_argument("triangle_rule: degree > 6 not tabulated");
  }
  return r;
}

std::recursive_mutex g_cache_mutex;

}  // namespace

const Rule1D& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  static std::map<int, Rule1D> cache;
  std::lock_guard lock(g_cache_mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
  return it->second;
}

const Rule1D& gauss_for_degree(int degree) {
  const int n = std::max(1, (degree + 2) / 2);
  return gauss_legendre(n);
}

const Rule1D& graded_toward_zero(const GradedRuleParams& params) {
  static std::map<std::tuple<int, double, int>, Rule1D> cache;
  std::lock_guard lock(g_cache_mutex);
  const auto key = std::make_tuple(params.levels, params.ratio, params.points_per_piece);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, make_graded(params)).first;
  return it->second;
}

const TriangleRule& triangle_rule(int degree) {
  static std::map<int, TriangleRule> cache;
  std::lock_guard lock(g_cache_mutex);
  const int key = degree <= 1 ? 1 : degree == 2 ? 2 : degree <= 4 ? 4 : 6;
  if (degree > 6) throw std::invalid_argument("triangle_rule: degree > 6 not tabulated");
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, make_triangle_rule(key)).first;
  return it->second;
}

}  // namespace kfbem::quad
