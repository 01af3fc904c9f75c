#pragma once

#include <string>
#include <vector>

#include "objectives.hpp"
#include "polynomial.hpp"

namespace linetri {

// Polynomial critical-point system of a rational objective, obtained by clearing the
// cubed denominators from grad f = 0.  Clearing can introduce spurious roots where a
// denominator vanishes; every consumer filters candidates through the original
// rational gradient (min_denominator + gradient residual).
struct CriticalSystem {
  int nvars = 1;
  std::vector<Polynomial> equations;     // nvars entries, scaled to unit max coefficient
  std::vector<Polynomial> jacobian;      // row-major d equations[i] / d x_k
  std::vector<Polynomial> denominators;  // per-view linear forms d_i
  RationalObjective objective;
  int expected_degree = 0;  // generic total degree of each cleared equation
  std::string tag;
};

namespace detail {

inline Polynomial affine_poly(int nvars, const VecXc& coeffs, Cplx constant) {
  return Polynomial::affine_form(nvars, coeffs, constant);
}

}  // namespace detail

// Cleared gradient system: for each variable k,
//   G_k = sum_i [ sum_c (w_ic d_i - n_ic)(N_ick d_i - n_ic g_ik) ] prod_{j != i} d_j^3.
// Each equation has generic total degree 3m-1; the univariate single-channel case
// collapses to 3m-2 because the inner bracket's quadratic part is a constant Wronskian.
inline CriticalSystem build_critical_system(const RationalObjective& obj, std::string tag) {
  const int m = obj.num_views();
  const int n = obj.nvars;
  if (m < 2) throw Error(ErrorCode::kArityMismatch, "need at least two views");

  CriticalSystem sys;
  sys.nvars = n;
  sys.objective = obj;
  sys.tag = std::move(tag);

  std::vector<Polynomial> d;  // per-view denominators
  std::vector<std::vector<Polynomial>> num;  // per-view numerator channels
  for (const auto& v : obj.views) {
    d.push_back(detail::affine_poly(n, v.g, v.h));
    std::vector<Polynomial> ch;
    for (Eigen::Index c = 0; c < v.w.size(); ++c)
      ch.push_back(detail::affine_poly(n, v.N.row(c).transpose(), v.nb[c]));
    num.push_back(std::move(ch));
  }
  sys.denominators = d;

  std::vector<Polynomial> dcube;
  for (const auto& di : d) dcube.push_back(di.pow(3));

  for (int k = 0; k < n; ++k) {
    Polynomial Gk(n);
    for (int i = 0; i < m; ++i) {
      const auto& v = obj.views[static_cast<size_t>(i)];
      Polynomial bracket(n);
      for (Eigen::Index c = 0; c < v.w.size(); ++c) {
        Polynomial res = d[static_cast<size_t>(i)] * v.w[c] - num[static_cast<size_t>(i)][static_cast<size_t>(c)];
        Polynomial wronsk = num[static_cast<size_t>(i)][static_cast<size_t>(c)].derivative(k) * d[static_cast<size_t>(i)] -
                            num[static_cast<size_t>(i)][static_cast<size_t>(c)] * d[static_cast<size_t>(i)].derivative(k);
        bracket = bracket + res * wronsk;
      }
      Polynomial prod = bracket;
      for (int j = 0; j < m; ++j)
        if (j != i) prod = prod * dcube[static_cast<size_t>(j)];
      Gk = Gk + prod;
    }
    Gk.trim(1e-14);
    if (Gk.is_zero())
      throw Error(ErrorCode::kZeroPolynomial, "critical equation degenerates for this data");
    Gk.scale_to_unit_max();
    sys.equations.push_back(std::move(Gk));
  }

  // univariate systems drop one degree: with n and d both linear in t, every channel's
  // Wronskian n' d - n d' is constant
  sys.expected_degree = (n == 1) ? 3 * m - 2 : 3 * m - 1;

  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) sys.jacobian.push_back(sys.equations[static_cast<size_t>(i)].derivative(k));
  return sys;
}

// Univariate critical polynomial for the point-on-line objectives, with its generic
// degree recorded.
struct UnivariateCritical {
  Polynomial poly;
  int expected_degree = 0;
  RationalObjective objective;
};

inline UnivariateCritical build_anchored_point_system(const RationalObjective& obj,
                                                      std::string /*unused*/ = {}) {
  if (obj.nvars != 1)
    throw Error(ErrorCode::kInvalidArgument, "anchored point system is univariate");
  CriticalSystem sys = build_critical_system(obj, "anchored-point");
  UnivariateCritical out;
  out.poly = sys.equations[0];
  out.expected_degree = 3 * obj.num_views() - 2;
  out.objective = obj;
  return out;
}

inline CriticalSystem build_anchored_line_system(const RationalObjective& obj) {
  if (obj.nvars != 2)
    throw Error(ErrorCode::kInvalidArgument, "anchored line system has two variables");
  return build_critical_system(obj, "anchored-line");
}

inline CriticalSystem build_point_mv_system(const RationalObjective& obj) {
  if (obj.nvars != 3)
    throw Error(ErrorCode::kInvalidArgument, "point triangulation system has three variables");
  return build_critical_system(obj, "point-mv");
}

}  // namespace linetri
