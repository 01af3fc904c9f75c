#pragma once

#include <string>
#include <vector>

#include "projective.hpp"

namespace linetri {

constexpr double kMembershipTol = 1e-10;

// Affine image observations of one space point, one per view.
struct PointTrack {
  std::vector<Vec2> views;
  PointTrack() = default;
  explicit PointTrack(std::vector<Vec2> v) : views(std::move(v)) {}
  int size() const { return static_cast<int>(views.size()); }
};

// Observed image lines, one per view.  Lines indistinguishable from the line at
// infinity are rejected: they have no affine trace to measure against.
struct LineTrack {
  std::vector<ImageLine> views;
  LineTrack() = default;
  explicit LineTrack(std::vector<ImageLine> v) : views(std::move(v)) {
    for (const auto& l : views)
      if (l.c.head<2>().norm() < 1e-10)
        throw Error(ErrorCode::kInvalidArgument, "observed line is the line at infinity");
  }
  int size() const { return static_cast<int>(views.size()); }
};

struct NamedResidual {
  std::string name;
  double value;
};

struct ResidualReport {
  std::vector<NamedResidual> residuals;
  double max_residual = 0.0;
  double tolerance = kMembershipTol;
  bool pass = true;

  void add(std::string name, double value) {
    residuals.push_back({std::move(name), value});
    max_residual = std::max(max_residual, value);
    pass = max_residual <= tolerance;
  }
};

namespace detail {

inline void check_arity(int views, int cameras) {
  if (views != cameras)
    throw Error(ErrorCode::kArityMismatch, "track arity does not match the camera count");
}

// Smallest singular value of the column-normalized stack [n_a n_b n_c]; vanishes
// exactly when the three back-projected planes share a line.
inline double plane_triple_residual(const Vec4& na, const Vec4& nb, const Vec4& nc) {
  Mat43 M;
  M.col(0) = na;
  M.col(1) = nb;
  M.col(2) = nc;
  Eigen::JacobiSVD<Mat43> svd(M);
  return svd.singularValues()(2);
}

}  // namespace detail

// Epipolar membership residuals of a point track: |x_1^T F^{1j} x_j| on canonical
// representatives, j = 2..m.
inline ResidualReport point_mv_residuals(const CameraArrangement& arr, const PointTrack& track,
                                         double tol = kMembershipTol) {
  detail::check_arity(track.size(), arr.size());
  ResidualReport rep;
  rep.tolerance = tol;
  HomPoint2 x1 = HomPoint2::from_affine(track.views[0]);
  for (int j = 1; j < arr.size(); ++j) {
    Mat3 F = fundamental_matrix(arr[0], arr[j]);
    HomPoint2 xj = HomPoint2::from_affine(track.views[static_cast<size_t>(j)]);
    rep.add("epipolar_1_" + std::to_string(j + 1), std::abs(x1.h.dot(F * xj.h)));
  }
  return rep;
}

// Membership residuals for a point track constrained to the fixed line L: the
// epipolar set plus per-view incidence with the projected line.
inline ResidualReport anchored_point_residuals(const CameraArrangement& arr, const SpatialLine& L,
                                               const PointTrack& track,
                                               double tol = kMembershipTol) {
  detail::check_arity(track.size(), arr.size());
  ResidualReport rep = point_mv_residuals(arr, track, tol);
  for (int i = 0; i < arr.size(); ++i) {
    ImageLine li = project_line(arr[i], L);
    HomPoint2 xi = HomPoint2::from_affine(track.views[static_cast<size_t>(i)]);
    rep.add("incidence_" + std::to_string(i + 1), incidence(li, xi));
  }
  return rep;
}

// Membership residuals of a line track: rank residuals of the back-projected plane
// triples (1,2,i) and (1,3,i) for i = 3..m.  Vacuous for m = 2.
inline ResidualReport line_mv_residuals(const CameraArrangement& arr, const LineTrack& track,
                                        double tol = kMembershipTol) {
  detail::check_arity(track.size(), arr.size());
  ResidualReport rep;
  rep.tolerance = tol;
  if (arr.size() == 2) return rep;
  std::vector<Vec4> n;
  n.reserve(static_cast<size_t>(arr.size()));
  for (int i = 0; i < arr.size(); ++i)
    n.push_back(back_project_line(arr[i], track.views[static_cast<size_t>(i)]).c);
  for (int i = 2; i < arr.size(); ++i) {
    rep.add("triple_1_2_" + std::to_string(i + 1), detail::plane_triple_residual(n[0], n[1], n[static_cast<size_t>(i)]));
    rep.add("triple_1_3_" + std::to_string(i + 1), detail::plane_triple_residual(n[0], n[2], n[static_cast<size_t>(i)]));
  }
  return rep;
}

// Membership residuals for a line track constrained through the fixed point X: the
// plane-triple set plus per-view incidence of each observed line with the image of X.
inline ResidualReport anchored_line_residuals(const CameraArrangement& arr, const HomPoint3& X,
                                              const LineTrack& track,
                                              double tol = kMembershipTol) {
  detail::check_arity(track.size(), arr.size());
  ResidualReport rep = line_mv_residuals(arr, track, tol);
  for (int i = 0; i < arr.size(); ++i) {
    HomPoint2 zi = project_point(arr[i], X);
    rep.add("incidence_" + std::to_string(i + 1),
            incidence(track.views[static_cast<size_t>(i)], zi));
  }
  return rep;
}

}  // namespace linetri
