#include <cmath>
#include <numbers>

#include "kfbem/error.hpp"
#include "kfbem/reference.hpp"

namespace kfbem {

namespace {
constexpr double kInvTwoPi = 0.5 / std::numbers::pi;
}

double GreenKernel::regular_part(Point2 x, Point2 y) const {
  if (kind == KernelKind::FullSpace) return 0.0;
  const double r2 = radius * radius;
  const double q = dot(x, x) * dot(y, y) - 2.0 * r2 * dot(x, y) + r2 * r2;
  return kInvTwoPi * 0.5 * std::log(q / r2);
}

double GreenKernel::operator()(Point2 x, Point2 y) const {
  const double r = distance(x, y);
  if (r < 1e-14) throw Error(ErrorCode::SingularPoint, "kernel evaluated at coincident points");
  return -kInvTwoPi * std::log(r) + regular_part(x, y);
}

double eval_kernel(const GreenKernel& kernel, Point2 x, Point2 y) { return kernel(x, y); }

}  // namespace kfbem
