#pragma once

#include <Eigen/Dense>

#include <limits>
#include <vector>

#include "projective.hpp"

namespace linetri {

struct GNConfig {
  int max_iters = 100;
  double grad_tol = 1e-12;
  double step_tol = 1e-14;
  // Start nearly undamped so benign problems converge at the Newton rate; rejected
  // steps raise lambda geometrically, so stiff problems still find their damping.
  double lambda_init = 1e-8;
  double lambda_max = 1e12;
};

struct GNResult {
  Eigen::VectorXd x;
  double objective = std::numeric_limits<double>::infinity();
  bool converged = false;
  int iters = 0;
};

// Damped Gauss-Newton (Levenberg style) on a residual function.  fn(x, r, J) fills the
// residual vector and its Jacobian; the objective is |r|^2.
template <typename ResidualFn>
GNResult gauss_newton(const ResidualFn& fn, Eigen::VectorXd x, const GNConfig& cfg = {}) {
  GNResult out;
  Eigen::VectorXd r;
  Eigen::MatrixXd J;
  fn(x, r, J);
  double cost = r.squaredNorm();
  double lambda = cfg.lambda_init;
  const int n = static_cast<int>(x.size());

  for (out.iters = 0; out.iters < cfg.max_iters; ++out.iters) {
    Eigen::VectorXd g = J.transpose() * r;
    if (g.lpNorm<Eigen::Infinity>() < cfg.grad_tol) {
      out.converged = true;
      break;
    }
    Eigen::MatrixXd H = J.transpose() * J;
    bool accepted = false;
    while (lambda <= cfg.lambda_max) {
      Eigen::MatrixXd Hl = H + lambda * Eigen::MatrixXd::Identity(n, n);
      Eigen::VectorXd delta = Hl.ldlt().solve(-g);
      Eigen::VectorXd xn = x + delta;
      Eigen::VectorXd rn;
      Eigen::MatrixXd Jn;
      fn(xn, rn, Jn);
      double cn = rn.squaredNorm();
      if (std::isfinite(cn) && cn < cost) {
        x = xn;
        r = rn;
        J = Jn;
        cost = cn;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        if (delta.norm() <= cfg.step_tol * (1.0 + x.norm())) out.converged = true;
        break;
      }
      lambda *= 4.0;
    }
    if (!accepted || out.converged) break;
  }
  out.x = x;
  out.objective = cost;
  return out;
}

template <typename ResidualFn>
GNResult gauss_newton_multistart(const ResidualFn& fn, const std::vector<Eigen::VectorXd>& starts,
                                 const GNConfig& cfg = {}) {
  if (starts.empty()) throw Error(ErrorCode::kInvalidArgument, "multistart needs start points");
  GNResult best;
  for (const auto& s : starts) {
    GNResult r = gauss_newton(fn, s, cfg);
    if (r.objective < best.objective) best = r;
  }
  return best;
}

}  // namespace linetri
