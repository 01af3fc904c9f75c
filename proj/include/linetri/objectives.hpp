#pragma once

#include <Eigen/Dense>

#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "constraints.hpp"
#include "projective.hpp"
#include "reduction.hpp"

namespace linetri {

using VecXc = Eigen::VectorXcd;
using Cplx = std::complex<double>;

constexpr double kDenominatorTol = 1e-8;

// All fitting objectives in this library share one shape: a sum over views of squared
// affine-patch residuals (w_c - n_c(x)/d(x))^2 with numerators and the per-view
// denominator affine-linear in the chart variables.  Data may be complex (critical
// point counts are taken over C); squares are analytic, without conjugation, so the
// gradient equations are polynomial after clearing denominators.
struct RationalView {
  Eigen::MatrixXcd N;  // channels x nvars, numerator coefficients
  VecXc nb;            // channels, numerator constants
  VecXc g;             // nvars, denominator coefficients
  Cplx h;              // denominator constant
  VecXc w;             // channels, data scalars
  double denom_scale;  // ||(g, h)|| frozen at build time, for relative thresholds
};

struct RationalObjective {
  int nvars = 1;
  std::vector<RationalView> views;

  // unconjugated inner product (Eigen's dot conjugates its left argument)
  static Cplx dotu(const VecXc& a, const VecXc& b) { return a.cwiseProduct(b).sum(); }

  Cplx value(const VecXc& x) const {
    Cplx acc(0.0);
    for (const auto& v : views) {
      Cplx d = dotu(v.g, x) + v.h;
      for (Eigen::Index c = 0; c < v.w.size(); ++c) {
        Cplx n = dotu(v.N.row(c).transpose(), x) + v.nb[c];
        Cplx r = v.w[c] - n / d;
        acc += r * r;
      }
    }
    return acc;
  }

  VecXc gradient(const VecXc& x) const {
    VecXc grad = VecXc::Zero(nvars);
    for (const auto& v : views) {
      Cplx d = dotu(v.g, x) + v.h;
      for (Eigen::Index c = 0; c < v.w.size(); ++c) {
        Cplx n = dotu(v.N.row(c).transpose(), x) + v.nb[c];
        Cplx r = v.w[c] - n / d;
        // d/dx_k (n/d) = (N_ck d - n g_k) / d^2
        VecXc dk = (v.N.row(c).transpose() * d - v.g * n) / (d * d);
        grad -= 2.0 * r * dk;
      }
    }
    return grad;
  }

  Eigen::MatrixXcd hessian(const VecXc& x) const {
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(nvars, nvars);
    for (const auto& v : views) {
      Cplx d = dotu(v.g, x) + v.h;
      for (Eigen::Index c = 0; c < v.w.size(); ++c) {
        VecXc Nc = v.N.row(c).transpose();
        Cplx n = dotu(Nc, x) + v.nb[c];
        Cplx r = v.w[c] - n / d;
        VecXc dk = (Nc * d - v.g * n) / (d * d);
        // d^2/dx_j dx_k (n/d) = (2 g_j g_k n - (N_cj g_k + N_ck g_j) d) / d^3
        Eigen::MatrixXcd d2 =
            (2.0 * n * v.g * v.g.transpose() -
             d * (Nc * v.g.transpose() + v.g * Nc.transpose())) /
            (d * d * d);
        H += 2.0 * (dk * dk.transpose() - r * d2);
      }
    }
    return H;
  }

  // Polish a candidate directly against the rational gradient.  Roots of the cleared
  // polynomial system carry an offset that grows near the denominator zero set, where
  // the cleared form evaluates with heavy cancellation; the rational form itself does
  // not, so a genuine critical point can be settled to rounding level here.  The
  // basins are stiff in that region (the Hessian varies on the scale of the smallest
  // denominator), hence Levenberg-Marquardt on the gradient system with the backward
  // residual as merit rather than plain Newton, which overshoots.  Returns the iterate
  // with the best backward residual; spurious clearing artifacts have no nearby
  // gradient zero and keep a residual orders of magnitude above rounding.
  VecXc refine_critical(const VecXc& x, int max_iters = 100) const {
    VecXc best = x, cur = x;
    double best_res = gradient_backward_residual(x);
    double lambda = 1e-3;
    int since_improved = 0;
    for (int it = 0; it < max_iters && best_res > 1e-14 && lambda < 1e12; ++it) {
      VecXc g = gradient(cur);
      Eigen::MatrixXcd H = hessian(cur);
      if (!g.allFinite() || !H.allFinite()) break;
      Eigen::MatrixXcd A = H.adjoint() * H;
      double diag = A.diagonal().real().maxCoeff();
      if (!(diag > 0.0) || !std::isfinite(diag)) break;
      VecXc rhs = -(H.adjoint() * g);
      VecXc step = (A + lambda * diag * Eigen::MatrixXcd::Identity(nvars, nvars))
                       .ldlt()
                       .solve(rhs);
      if (!step.allFinite()) break;
      VecXc trial = cur + step;
      double res = min_denominator(trial) < 1e-10 ? std::numeric_limits<double>::infinity()
                                                  : gradient_backward_residual(trial);
      if (res < gradient_backward_residual(cur)) {
        cur = trial;
        lambda = std::max(lambda * 0.3, 1e-12);
        if (res < best_res) {
          best_res = res;
          best = cur;
          since_improved = 0;
        } else if (++since_improved > 10) {
          break;
        }
      } else {
        lambda *= 10.0;
        ++since_improved;
        if (since_improved > 30) break;
      }
      if (step.norm() <= 1e-17 * std::max(1.0, cur.norm())) break;
    }
    return best;
  }

  double real_value(const Eigen::VectorXd& x) const { return value(x.cast<Cplx>()).real(); }

  Eigen::VectorXd real_gradient(const Eigen::VectorXd& x) const {
    return gradient(x.cast<Cplx>()).real();
  }

  // Max gradient component relative to the triangle-inequality magnitude of the terms
  // summed to produce it.  A genuine critical point scores at rounding level even when
  // the gradient entries themselves are large numbers times a tiny cancellation.
  double gradient_backward_residual(const VecXc& x) const {
    VecXc grad = VecXc::Zero(nvars);
    Eigen::VectorXd scale = Eigen::VectorXd::Zero(nvars);
    for (const auto& v : views) {
      Cplx d = dotu(v.g, x) + v.h;
      double ad = std::abs(d);
      for (Eigen::Index c = 0; c < v.w.size(); ++c) {
        Cplx n = dotu(v.N.row(c).transpose(), x) + v.nb[c];
        Cplx r = v.w[c] - n / d;
        double rb = std::abs(v.w[c]) + std::abs(n) / ad;
        for (int k = 0; k < nvars; ++k) {
          Cplx dk = (v.N(c, k) * d - v.g[k] * n) / (d * d);
          grad[k] -= 2.0 * r * dk;
          scale[k] += 2.0 * rb * (std::abs(v.N(c, k)) * ad + std::abs(v.g[k]) * std::abs(n)) /
                      (ad * ad);
        }
      }
    }
    double worst = 0.0;
    for (int k = 0; k < nvars; ++k)
      worst = std::max(worst, std::abs(grad[k]) / std::max(scale[k], 1e-300));
    return worst;
  }

  // Smallest per-view denominator magnitude relative to its coefficient scale; used to
  // reject spurious critical candidates introduced by clearing denominators.
  double min_denominator(const VecXc& x) const {
    double best = std::numeric_limits<double>::infinity();
    double xs = std::max(1.0, x.norm());
    for (const auto& v : views) {
      Cplx d = dotu(v.g, x) + v.h;
      best = std::min(best, std::abs(d) / (v.denom_scale * xs));
    }
    return best;
  }

  int num_views() const { return static_cast<int>(views.size()); }
};

namespace detail {

inline double denom_scale_of(const VecXc& g, Cplx h) {
  return std::sqrt(g.squaredNorm() + std::norm(h));
}

// In-plane direction orthogonal to the reduced patch covector g3 = A e3.
inline Vec2 reduced_patch_direction(const Vec2& g3, const std::string& where) {
  double n = g3.norm();
  if (n < 1e-10)
    throw Error(ErrorCode::kDegenerateDenominator, "affine patch degenerates " + where);
  return Vec2(-g3.y(), g3.x()) / n;
}

}  // namespace detail

// Reduced point-on-line objective: one scalar channel per view in the isometric
// coordinates, chart s = (t, 1).
inline RationalObjective make_objective_anchored_point_reduced(const ReducedPointProblem& p) {
  RationalObjective obj;
  obj.nvars = 1;
  for (size_t j = 0; j < p.cameras.size(); ++j) {
    Vec2 g3 = p.A[j].col(2);
    Vec2 dir = detail::reduced_patch_direction(g3, "in view " + std::to_string(j + 1));
    const Mat2& C = p.cameras[j];
    RationalView v;
    v.N = Eigen::MatrixXcd(1, 1);
    v.N(0, 0) = Cplx(dir.dot(C.col(0)));
    v.nb = VecXc(1);
    v.nb[0] = Cplx(dir.dot(C.col(1)));
    v.g = VecXc(1);
    v.g[0] = Cplx(g3.dot(C.col(0)));
    v.h = Cplx(g3.dot(C.col(1)));
    v.w = VecXc(1);
    v.w[0] = Cplx(dir.dot(p.data[j]));
    v.denom_scale = detail::denom_scale_of(v.g, v.h);
    obj.views.push_back(std::move(v));
  }
  return obj;
}

// Direct point-on-line objective: two affine image residual channels per view sharing
// the projective depth denominator, same chart s = (t, 1) over the line's span.
inline RationalObjective make_objective_anchored_point_std(const CameraArrangement& arr,
                                                           const SpatialLine& L,
                                                           const PointTrack& track) {
  detail::check_arity(track.size(), arr.size());
  RationalObjective obj;
  obj.nvars = 1;
  for (int j = 0; j < arr.size(); ++j) {
    Eigen::Matrix<double, 3, 2> M = arr[j].P * L.span;
    if (M.row(2).norm() < 1e-12 * M.norm())
      throw Error(ErrorCode::kDegenerateDenominator,
                  "line maps to the line at infinity in view " + std::to_string(j + 1));
    RationalView v;
    v.N = Eigen::MatrixXcd(2, 1);
    v.nb = VecXc(2);
    v.w = VecXc(2);
    for (int c = 0; c < 2; ++c) {
      v.N(c, 0) = Cplx(M(c, 0));
      v.nb[c] = Cplx(M(c, 1));
      v.w[c] = Cplx(track.views[static_cast<size_t>(j)][c]);
    }
    v.g = VecXc(1);
    v.g[0] = Cplx(M(2, 0));
    v.h = Cplx(M(2, 1));
    v.denom_scale = detail::denom_scale_of(v.g, v.h);
    obj.views.push_back(std::move(v));
  }
  return obj;
}

// Reduced line-through-point objective: one scalar channel per view, chart
// Y = (Y1, Y2), candidate line coordinates (Y1, Y2, 1) over P(X^perp).
inline RationalObjective make_objective_anchored_line_reduced(const ReducedLineProblem& p) {
  RationalObjective obj;
  obj.nvars = 2;
  for (size_t i = 0; i < p.cameras.size(); ++i) {
    Vec2 g3 = p.A[i].col(2);
    Vec2 dir = detail::reduced_patch_direction(g3, "in view " + std::to_string(i + 1));
    const Mat23& C = p.cameras[i];
    RationalView v;
    v.N = Eigen::MatrixXcd(1, 2);
    v.nb = VecXc(1);
    v.g = VecXc(2);
    for (int k = 0; k < 2; ++k) {
      v.N(0, k) = Cplx(dir.dot(C.col(k)));
      v.g[k] = Cplx(g3.dot(C.col(k)));
    }
    v.nb[0] = Cplx(dir.dot(C.col(2)));
    v.h = Cplx(g3.dot(C.col(2)));
    v.w = VecXc(1);
    v.w[0] = Cplx(dir.dot(p.data[i]));
    v.denom_scale = detail::denom_scale_of(v.g, v.h);
    obj.views.push_back(std::move(v));
  }
  return obj;
}

// Direct line-through-point objective: two dual-affine residual channels per view on
// the raw pencil coordinates, same chart Y over P(X^perp).
inline RationalObjective make_objective_anchored_line_std(const CameraArrangement& arr,
                                                          const HomPoint3& X,
                                                          const LineTrack& track) {
  detail::check_arity(track.size(), arr.size());
  Mat43 F = complement_basis_4(X.h);
  RationalObjective obj;
  obj.nvars = 2;
  for (int i = 0; i < arr.size(); ++i) {
    Vec3 zi = arr[i].P * X.h;
    if (zi.norm() < kIncidenceTol * arr[i].P.norm())
      throw Error(ErrorCode::kCenterCoincidence,
                  "anchor point coincides with the center of view " + std::to_string(i + 1));
    Mat3 Ni = skew3(canonical_homogeneous(zi)) * (arr[i].P * F);
    if (Ni.row(2).norm() < 1e-12 * Ni.norm())
      throw Error(ErrorCode::kDegenerateDenominator,
                  "pencil lies in the dual patch boundary in view " + std::to_string(i + 1));
    const Vec3& u = track.views[static_cast<size_t>(i)].c;
    if (std::abs(u.z()) < 1e-12)
      throw Error(ErrorCode::kPatchInfinity,
                  "observed line lies outside the dual affine patch in view " + std::to_string(i + 1));
    RationalView v;
    v.N = Eigen::MatrixXcd(2, 2);
    v.nb = VecXc(2);
    v.w = VecXc(2);
    for (int c = 0; c < 2; ++c) {
      v.N(c, 0) = Cplx(Ni(c, 0));
      v.N(c, 1) = Cplx(Ni(c, 1));
      v.nb[c] = Cplx(Ni(c, 2));
      v.w[c] = Cplx(u[c] / u.z());
    }
    v.g = VecXc(2);
    v.g[0] = Cplx(Ni(2, 0));
    v.g[1] = Cplx(Ni(2, 1));
    v.h = Cplx(Ni(2, 2));
    v.denom_scale = detail::denom_scale_of(v.g, v.h);
    obj.views.push_back(std::move(v));
  }
  return obj;
}

// Unconstrained triangulation objective: two affine residual channels per view over the
// chart X = (X1, X2, X3), homogeneous (X, 1).
inline RationalObjective make_objective_point_mv(const CameraArrangement& arr,
                                                 const PointTrack& track) {
  detail::check_arity(track.size(), arr.size());
  RationalObjective obj;
  obj.nvars = 3;
  for (int j = 0; j < arr.size(); ++j) {
    const Mat34& P = arr[j].P;
    RationalView v;
    v.N = Eigen::MatrixXcd(2, 3);
    v.nb = VecXc(2);
    v.w = VecXc(2);
    for (int c = 0; c < 2; ++c) {
      for (int k = 0; k < 3; ++k) v.N(c, k) = Cplx(P(c, k));
      v.nb[c] = Cplx(P(c, 3));
      v.w[c] = Cplx(track.views[static_cast<size_t>(j)][c]);
    }
    v.g = VecXc(3);
    for (int k = 0; k < 3; ++k) v.g[k] = Cplx(P(2, k));
    v.h = Cplx(P(2, 3));
    v.denom_scale = detail::denom_scale_of(v.g, v.h);
    obj.views.push_back(std::move(v));
  }
  return obj;
}

}  // namespace linetri
