#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace kfbem {

using cplx = std::complex<double>;

using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;
using RowMatrixXc = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using SparseRowC = Eigen::SparseMatrix<cplx, Eigen::RowMajor, int>;
using SparseColC = Eigen::SparseMatrix<cplx, Eigen::ColMajor, int>;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Point2() = default;
  constexpr Point2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Point2 operator+(Point2 o) const { return {x + o.x, y + o.y}; }
  constexpr Point2 operator-(Point2 o) const { return {x - o.x, y - o.y}; }
  constexpr Point2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Point2 operator/(double s) const { return {x / s, y / s}; }
  constexpr bool operator==(const Point2&) const = default;
};

constexpr Point2 operator*(double s, Point2 p) { return p * s; }
constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

/// Closed straight segment from `a` to `b`, parametrised as a + t (b - a), t in [0, 1].
struct Segment {
  Point2 a;
  Point2 b;

  Point2 at(double t) const { return a + (b - a) * t; }
  double length() const { return distance(a, b); }
};

}  // namespace kfbem
