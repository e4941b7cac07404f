#include "kfbem/surrogate.hpp"

#include <cmath>
#include <random>
#include <string>

#include <Eigen/IterativeLinearSolvers>

#include "kfbem/error.hpp"

namespace kfbem {

GmresResult gmres(const LinearOperator& a, const LinearOperator& precond, const VectorXc& b, VectorXc& x,
                  double tol, int restart, int max_iterations) {
  GmresResult res;
  const Eigen::Index n = b.size();
  const double bnorm = b.norm();
  if (x.size() != n) x = VectorXc::Zero(n);
  if (bnorm == 0.0) {
    x.setZero();
    res.converged = true;
    return res;
  }
  VectorXc r(n), w(n), z(n), ax(n);
  const int m = std::max(1, restart);
  MatrixXc v(n, m + 1);
  MatrixXc h = MatrixXc::Zero(m + 1, m);
  VectorXc cs(m), g(m + 1);
  Eigen::VectorXd sn(m);

  for (;;) {
    a(x, ax);
    r = b - ax;
    double beta = r.norm();
    res.relative_residual = beta / bnorm;
    if (res.relative_residual <= tol) {
      res.converged = true;
      return res;
    }
    if (res.iterations >= max_iterations) return res;
    v.col(0) = r / beta;
    g.setZero();
    g[0] = beta;
    h.setZero();
    int k = 0;
    for (; k < m && res.iterations < max_iterations; ++k) {
      ++res.iterations;
      precond(v.col(k), z);
      a(z, w);
      for (int i = 0; i <= k; ++i) {
        h(i, k) = v.col(i).dot(w);
        w -= h(i, k) * v.col(i);
      }
      const double hn = w.norm();
      h(k + 1, k) = hn;
      if (hn > 0.0) v.col(k + 1) = w / hn;
      for (int i = 0; i < k; ++i) {
        // apply earlier rotations
        const cplx t = std::conj(cs[i]) * h(i, k) + sn[i] * h(i + 1, k);
        h(i + 1, k) = -sn[i] * h(i, k) + cs[i] * h(i + 1, k);
        h(i, k) = t;
      }
      const cplx hk = h(k, k);
      const double denom = std::sqrt(std::norm(hk) + hn * hn);
      if (denom == 0.0) {
        cs[k] = 1.0;
        sn[k] = 0.0;
      } else if (std::abs(hk) == 0.0) {
        cs[k] = 0.0;
        sn[k] = 1.0;
      } else {
        cs[k] = hk / denom;
        sn[k] = hn / denom;
      }
      h(k, k) = std::conj(cs[k]) * hk + sn[k] * hn;
      h(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = std::conj(cs[k]) * g[k];
      if (std::abs(g[k + 1]) / bnorm <= 0.5 * tol || hn == 0.0) {
        ++k;
        break;
      }
    }
    // solve the triangular system and update x
    VectorXc y = h.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    VectorXc dx = v.leftCols(k) * y;
    precond(dx, z);
    x += z;
  }
}

struct SurrogateInverse::Impl {
  SparseRowC l;
  SparseRowC lh;
  Eigen::IncompleteLUT<cplx, int> ilu;
  Eigen::IncompleteLUT<cplx, int> ilu_h;
  bool adjoint_ready = false;
};

SurrogateInverse::SurrogateInverse(const SparseRowC& l, SurrogateConfig cfg)
    : impl_(std::make_unique<Impl>()), cfg_(cfg) {
  if (!(cfg_.tolerance > 0.0)) throw Error(ErrorCode::NoConvergence, "surrogate tolerance must be positive");
  impl_->l = l;
  impl_->ilu.setDroptol(cfg_.ilut_drop);
  impl_->ilu.setFillfactor(cfg_.ilut_fill);
  if (l.rows() > 0) impl_->ilu.compute(l);
}

SurrogateInverse::~SurrogateInverse() = default;
SurrogateInverse::SurrogateInverse(SurrogateInverse&&) noexcept = default;
SurrogateInverse& SurrogateInverse::operator=(SurrogateInverse&&) noexcept = default;

int SurrogateInverse::size() const { return static_cast<int>(impl_->l.rows()); }

VectorXc SurrogateInverse::solve(const VectorXc& b) const {
  VectorXc x = VectorXc::Zero(b.size());
  if (b.size() == 0) return x;
  const auto& l = impl_->l;
  const auto& ilu = impl_->ilu;
  const GmresResult r = gmres([&](const VectorXc& in, VectorXc& out) { out = l * in; },
                              [&](const VectorXc& in, VectorXc& out) { out = ilu.solve(in); }, b, x,
                              cfg_.tolerance, cfg_.restart, cfg_.max_iterations);
  ++stats_.solves;
  stats_.total_iterations += r.iterations;
  stats_.max_iterations = std::max(stats_.max_iterations, r.iterations);
  stats_.max_relative_residual = std::max(stats_.max_relative_residual, r.relative_residual);
  if (!r.converged) {
    throw Error(ErrorCode::NoConvergence, "GMRES stopped at relative residual " + std::to_string(r.relative_residual) +
                                              " after " + std::to_string(r.iterations) + " iterations");
  }
  return x;
}

VectorXc SurrogateInverse::solve_adjoint(const VectorXc& b) const {
  if (!impl_->adjoint_ready) {
    impl_->lh = impl_->l.adjoint();
    impl_->ilu_h.setDroptol(cfg_.ilut_drop);
    impl_->ilu_h.setFillfactor(cfg_.ilut_fill);
    if (impl_->lh.rows() > 0) impl_->ilu_h.compute(impl_->lh);
    impl_->adjoint_ready = true;
  }
  VectorXc x = VectorXc::Zero(b.size());
  if (b.size() == 0) return x;
  const auto& lh = impl_->lh;
  const auto& ilu = impl_->ilu_h;
  const GmresResult r = gmres([&](const VectorXc& in, VectorXc& out) { out = lh * in; },
                              [&](const VectorXc& in, VectorXc& out) { out = ilu.solve(in); }, b, x,
                              cfg_.tolerance, cfg_.restart, cfg_.max_iterations);
  if (!r.converged) throw Error(ErrorCode::NoConvergence, "adjoint GMRES did not converge");
  return x;
}

RowMatrixXc SurrogateInverse::solve_block(const RowMatrixXc& b) const {
  RowMatrixXc x(b.rows(), b.cols());
  for (Eigen::Index c = 0; c < b.cols(); ++c) x.col(c) = solve(b.col(c));
  return x;
}

double power_iteration_lambda_max(const SparseRowC& g, int steps, unsigned seed) {
  const Eigen::Index n = g.rows();
  if (n == 0) return 0.0;
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  VectorXc v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = cplx(nd(rng), nd(rng));
  v.normalize();
  double lambda = 0.0;
  for (int s = 0; s < steps; ++s) {
    VectorXc w = g * v;
    lambda = v.dot(w).real();
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    v = w / wn;
  }
  return lambda;
}

double inverse_norm_estimate(const std::function<VectorXc(const VectorXc&)>& solve,
                             const std::function<VectorXc(const VectorXc&)>& solve_adjoint, int n, int steps,
                             unsigned seed) {
  if (n == 0) return 0.0;
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  VectorXc v(n);
  for (int i = 0; i < n; ++i) v[i] = cplx(nd(rng), nd(rng));
  v.normalize();
  double sigma = 0.0;
  for (int s = 0; s < steps; ++s) {
    const VectorXc y = solve(v);
    sigma = y.norm();
    VectorXc w = solve_adjoint(y);
    const double wn = w.norm();
    if (wn == 0.0) break;
    v = w / wn;
  }
  return sigma;
}

SurrogateSolveResult surrogate_solve_multi(const SparseRowC& l, const SurrogateConfig& cfg, const RowMatrixXc& rhs,
                                           const SparseRowC& h1_gram) {
  SurrogateInverse inv(l, cfg);
  SurrogateSolveResult out;
  out.solution = inv.solve_block(rhs);
  out.stats = inv.stats();
  SurrogateConfig tight = cfg;
  tight.tolerance = std::min(cfg.tolerance, 1e-8);
  SurrogateInverse probe(l, tight);
  const double inv_norm = inverse_norm_estimate([&](const VectorXc& b) { return probe.solve(b); },
                                                [&](const VectorXc& b) { return probe.solve_adjoint(b); },
                                                static_cast<int>(l.rows()));
  out.kappa_bound = inv_norm * power_iteration_lambda_max(h1_gram, 50);
  out.eps_d_estimate = cfg.tolerance * out.kappa_bound;
  return out;
}

}  // namespace kfbem
