#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include "critical.hpp"
#include "scene.hpp"
#include "tracker.hpp"

namespace linetri {

// A slice solution counts only when every image factor is a genuine projective point;
// solutions that force some factor to the zero vector lie outside the variety.
constexpr double kFactorVanishTol = 1e-8;

enum class AnchoredVariety { kPointOnLine, kLineThroughPoint };

struct MultidegreeStats {
  AnchoredVariety variety = AnchoredVariety::kPointOnLine;
  std::vector<int> pattern;
  int trials = 0;
  std::vector<int> counts;  // per trial
  int modal = 0;
  double agreement = 0.0;  // fraction of trials at the modal count
};

namespace detail {

inline void validate_pattern(const std::vector<int>& pattern, int m, int dim) {
  if (static_cast<int>(pattern.size()) != m)
    throw Error(ErrorCode::kBadSlicePattern, "slice pattern length must match the view count");
  int sum = 0;
  for (int d : pattern) {
    if (d < 0 || d > 2)
      throw Error(ErrorCode::kBadSlicePattern, "slice codimensions must lie in [0, 2]");
    sum += d;
  }
  if (sum != dim)
    throw Error(ErrorCode::kBadSlicePattern,
                "slice codimensions must sum to the variety dimension");
}

inline VecXc random_complex_vec(Rng& rng, int n) {
  VecXc v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.normal_complex();
  return v;
}

// Point-on-line variety, dimension 1: parameterized over s in P^1 by s -> (M_1 s, ...),
// M_j = P_j * span.  One slice hyperplane somewhere; the slice equation is linear in s.
inline int point_slice_trial(const CameraArrangement& arr, const std::vector<int>& pattern,
                             std::uint64_t seed, int trial) {
  const int m = arr.size();
  for (int attempt = 0; attempt < kSceneRetries; ++attempt) {
    Rng rng = Rng::derive(Rng::mix(seed, 0x5D1CE0), static_cast<std::uint64_t>(trial),
                          static_cast<std::uint64_t>(attempt));
    try {
      SpatialLine L = random_scene_line(rng, arr);
      std::vector<Eigen::Matrix<double, 3, 2>> M;
      for (int j = 0; j < m; ++j) M.push_back(arr[j].P * L.span);
      int i0 = 0;
      while (pattern[static_cast<size_t>(i0)] == 0) ++i0;
      VecXc lambda = random_complex_vec(rng, 3);
      Eigen::RowVector2cd row = lambda.transpose() * M[static_cast<size_t>(i0)].cast<Cplx>();
      if (row.norm() < 1e-10 * lambda.norm() * M[static_cast<size_t>(i0)].norm())
        continue;  // degenerate slice, redraw
      // affine chart s = (t, 1): row[0] t + row[1] = 0
      VecXc coeffs(2);
      coeffs[0] = row[1];
      coeffs[1] = row[0];
      UnivariateRoots roots = solve_univariate(coeffs);
      Eigen::Vector2cd s;
      if (roots.roots.size() == 1) {
        s << roots.roots[0], Cplx(1.0);
      } else {
        s << Cplx(1.0), Cplx(0.0);  // leading term vanished: the chart-infinity solution
      }
      for (int j = 0; j < m; ++j) {
        double num = (M[static_cast<size_t>(j)].cast<Cplx>() * s).norm();
        if (num <= kFactorVanishTol * M[static_cast<size_t>(j)].norm() * s.norm()) return 0;
      }
      return 1;
    } catch (const Error&) {
      // degenerate line draw, retry
    }
  }
  throw Error(ErrorCode::kDegenerateScene, "point slice: no generic instance found");
}

// Line-through-point variety, dimension 2: parameterized over Ybar in P^2 by
// Ybar -> (N_1 Ybar, ...), N_i = [z_i]_x P_i F_X.  Two slice hyperplanes in total.
inline int line_slice_trial(const CameraArrangement& arr, const std::vector<int>& pattern,
                            std::uint64_t seed, int trial, const TrackerConfig& base) {
  const int m = arr.size();
  for (int attempt = 0; attempt < kSceneRetries; ++attempt) {
    Rng rng = Rng::derive(Rng::mix(seed, 0x5D1CE1), static_cast<std::uint64_t>(trial),
                          static_cast<std::uint64_t>(attempt));
    try {
      HomPoint3 X = random_affine_point3(rng);
      Mat43 F = complement_basis_4(X.h);
      std::vector<Mat3> N;
      for (int i = 0; i < m; ++i) {
        Vec3 zi = arr[i].P * X.h;
        if (zi.norm() < 1e-10 * arr[i].P.norm())
          throw Error(ErrorCode::kCenterCoincidence, "anchor hits a camera center");
        N.push_back(skew3(canonical_homogeneous(zi)) * (arr[i].P * F));
      }
      Eigen::Matrix<Cplx, 2, 3> S;
      int r = 0;
      for (int i = 0; i < m; ++i)
        for (int d = 0; d < pattern[static_cast<size_t>(i)]; ++d)
          S.row(r++) = (random_complex_vec(rng, 3).transpose() * N[static_cast<size_t>(i)].cast<Cplx>());
      // affine chart Ybar = (Y1, Y2, 1): two linear equations through the path tracker
      CriticalSystem sys;
      sys.nvars = 2;
      sys.tag = "multidegree-slice";
      sys.objective.nvars = 2;
      for (int q = 0; q < 2; ++q) {
        VecXc lin(2);
        lin << S(q, 0), S(q, 1);
        Polynomial eq = Polynomial::affine_form(2, lin, S(q, 2));
        eq.trim(1e-14);
        if (eq.is_zero()) throw Error(ErrorCode::kZeroPolynomial, "vanishing slice form");
        eq.scale_to_unit_max();
        sys.equations.push_back(std::move(eq));
      }
      sys.expected_degree = 1;
      for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k)
          sys.jacobian.push_back(sys.equations[static_cast<size_t>(i)].derivative(k));
      TrackerConfig cfg = base;
      cfg.seed = Rng::mix(Rng::mix(seed, 0x5D1CE1), static_cast<std::uint64_t>(trial));
      CriticalPointSet set = track_paths(sys, cfg);
      Eigen::Vector3cd Y;
      if (set.finite_regular.size() == 1) {
        Y << set.finite_regular[0][0], set.finite_regular[0][1], Cplx(1.0);
      } else {
        // chart-infinity or ill-conditioned solution: homogeneous kernel of the slice
        Eigen::JacobiSVD<Eigen::Matrix<Cplx, 2, 3>> svd(S, Eigen::ComputeFullV);
        if (svd.singularValues()(1) < 1e-10 * svd.singularValues()(0))
          continue;  // slice not transverse, redraw
        Y = svd.matrixV().col(2);
      }
      for (int i = 0; i < m; ++i) {
        double num = (N[static_cast<size_t>(i)].cast<Cplx>() * Y).norm();
        if (num <= kFactorVanishTol * N[static_cast<size_t>(i)].norm() * Y.norm()) return 0;
      }
      return 1;
    } catch (const Error&) {
      // degenerate draw, retry
    }
  }
  throw Error(ErrorCode::kDegenerateScene, "line slice: no generic instance found");
}

}  // namespace detail

// Counts variety points surviving a random linear slice of the prescribed codimension
// per image factor; the anchor is redrawn per trial so the statistic covers generic
// anchored varieties over the fixed arrangement.
inline MultidegreeStats multidegree_check(const CameraArrangement& arr, AnchoredVariety variety,
                                          const std::vector<int>& pattern, int trials,
                                          std::uint64_t seed,
                                          const TrackerConfig& base_cfg = {}) {
  if (trials < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one trial");
  const int dim = (variety == AnchoredVariety::kPointOnLine) ? 1 : 2;
  detail::validate_pattern(pattern, arr.size(), dim);
  MultidegreeStats st;
  st.variety = variety;
  st.pattern = pattern;
  st.trials = trials;
  for (int tr = 0; tr < trials; ++tr) {
    int c = (variety == AnchoredVariety::kPointOnLine)
                ? detail::point_slice_trial(arr, pattern, seed, tr)
                : detail::line_slice_trial(arr, pattern, seed, tr, base_cfg);
    st.counts.push_back(c);
  }
  std::map<int, int> freq;
  for (int c : st.counts) ++freq[c];
  int best = -1;
  for (const auto& [count, n] : freq)
    if (n > best) {
      best = n;
      st.modal = count;
    }
  int at_modal = 0;
  for (int c : st.counts)
    if (c == st.modal) ++at_modal;
  st.agreement = st.counts.empty() ? 0.0 : double(at_modal) / double(st.counts.size());
  return st;
}

}  // namespace linetri
