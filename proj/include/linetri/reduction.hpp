#pragma once

#include <vector>

#include "constraints.hpp"
#include "projective.hpp"

namespace linetri {

// Reduction of point-on-line fitting.  With the line's orthonormal span [l0 l1], view j
// acts on line points through M_j = C_j [l0 l1]; the 2-plane V_j = colspace(M_j) carries
// all of the fitting geometry, and A_j maps V_j isometrically onto R^2.  The third
// column of A_j (the image of the patch covector e3) is what the objective builders use
// to dehomogenize inside the reduced coordinates.
struct ReducedPointProblem {
  Mat42 span_basis;          // orthonormal [l0 l1]
  std::vector<Mat23> A;      // orthonormal rows spanning V_j
  std::vector<Mat2> cameras; // reduced cameras A_j M_j
  std::vector<Vec2> data;    // A_j q_j for the affine lifts q_j = (u_1, u_2, 1)
};

inline ReducedPointProblem reduce_anchored_point(const CameraArrangement& arr,
                                                 const SpatialLine& L,
                                                 const PointTrack& track) {
  detail::check_arity(track.size(), arr.size());
  ReducedPointProblem out;
  out.span_basis = L.span;
  out.A.reserve(static_cast<size_t>(arr.size()));
  out.cameras.reserve(static_cast<size_t>(arr.size()));
  out.data.reserve(static_cast<size_t>(arr.size()));
  for (int j = 0; j < arr.size(); ++j) {
    Eigen::Matrix<double, 3, 2> M = arr[j].P * L.span;
    Eigen::JacobiSVD<Eigen::Matrix<double, 3, 2>> svd(M, Eigen::ComputeFullU);
    const auto& s = svd.singularValues();
    if (!(s[0] > 0) || s[1] < kRankRelTol * s[0])
      throw Error(ErrorCode::kRankDeficiency,
                  "line projects to a point in view " + std::to_string(j + 1));
    Mat23 Aj;
    Aj.row(0) = svd.matrixU().col(0).transpose();
    Aj.row(1) = svd.matrixU().col(1).transpose();
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 3; ++c)
        if (std::abs(Aj(r, c)) > kSignEps) {
          if (Aj(r, c) < 0) Aj.row(r) = -Aj.row(r);
          c = 3;
          break;
        }
    const Vec2& u = track.views[static_cast<size_t>(j)];
    out.A.push_back(Aj);
    out.cameras.push_back(Mat2(Aj * M));
    out.data.push_back(Vec2(Aj * Vec3(u.x(), u.y(), 1.0)));
  }
  return out;
}

// Membership residual of the reduced track: smallest singular value of the stacked,
// row-normalized cross equations cross2(data_j, C~_j s) = 0.  Zero iff some common
// parameter s reproduces every reduced datum up to scale.
inline double reduced_point_membership_residual(const ReducedPointProblem& p) {
  const int m = static_cast<int>(p.cameras.size());
  Eigen::MatrixXd R(m, 2);
  for (int j = 0; j < m; ++j) {
    const Vec2& d = p.data[static_cast<size_t>(j)];
    const Mat2& C = p.cameras[static_cast<size_t>(j)];
    Eigen::RowVector2d row = d.y() * C.row(0) - d.x() * C.row(1);
    double scale = d.norm() * C.norm();
    if (scale < 1e-300) throw Error(ErrorCode::kInvalidArgument, "degenerate reduced view");
    R.row(j) = row / scale;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(R);
  return svd.singularValues()(1);
}

// Lift a chart parameter t (chart s = (t, 1)) back to a space point on the line.
inline HomPoint3 lift_point(const ReducedPointProblem& p, double t) {
  if (!std::isfinite(t) || std::abs(t) > 1e12)
    throw Error(ErrorCode::kPatchInfinity, "reduced solution lies at patch infinity");
  return HomPoint3(Vec4(p.span_basis * Vec2(t, 1.0)));
}

// Reduction of line-through-point fitting.  Lines through X are parameterized by the
// plane P(X^perp) via Y -> span{X, F_X Y}; view i sees only the pencil through
// z_i = C_i X, and A_i maps the 2-plane z_i^perp isometrically onto R^2.
struct ReducedLineProblem {
  HomPoint3 anchor;            // X
  Mat43 point_complement;      // F_X: orthonormal columns orthogonal to X
  std::vector<Mat23> A;        // orthonormal rows spanning z_i^perp
  std::vector<Mat23> cameras;  // reduced cameras A_i [z_i]_x C_i F_X
  std::vector<Vec2> data;      // A_i (u_i / u_{i,3}), dual-patch-normalized lines
};

inline ReducedLineProblem reduce_anchored_line(const CameraArrangement& arr, const HomPoint3& X,
                                               const LineTrack& track) {
  detail::check_arity(track.size(), arr.size());
  ReducedLineProblem out;
  out.anchor = X;
  out.point_complement = complement_basis_4(X.h);
  out.A.reserve(static_cast<size_t>(arr.size()));
  out.cameras.reserve(static_cast<size_t>(arr.size()));
  out.data.reserve(static_cast<size_t>(arr.size()));
  for (int i = 0; i < arr.size(); ++i) {
    Vec3 zi = arr[i].P * X.h;
    if (zi.norm() < kIncidenceTol * arr[i].P.norm())
      throw Error(ErrorCode::kCenterCoincidence,
                  "anchor point coincides with the center of view " + std::to_string(i + 1));
    Vec3 z = canonical_homogeneous(zi);
    Mat23 Ai = complement_basis_3(z);
    Mat3 Ni = skew3(z) * (arr[i].P * out.point_complement);
    Mat23 Ci = Ai * Ni;
    Eigen::JacobiSVD<Mat23> svd(Ci);
    const auto& s = svd.singularValues();
    if (!(s[0] > 0) || s[1] < kRankRelTol * s[0])
      throw Error(ErrorCode::kRankDeficiency,
                  "pencil map is rank deficient in view " + std::to_string(i + 1));
    const Vec3& u = track.views[static_cast<size_t>(i)].c;
    if (std::abs(u.z()) < 1e-12)
      throw Error(ErrorCode::kPatchInfinity,
                  "observed line lies outside the dual affine patch in view " + std::to_string(i + 1));
    out.A.push_back(Ai);
    out.cameras.push_back(Ci);
    out.data.push_back(Vec2(Ai * (u / u.z())));
  }
  return out;
}

// Membership residual of the reduced line track: smallest singular value of the
// stacked cross equations cross2(data_i, C^_i Y) = 0 over Y in P(X^perp).
// Vacuously zero for m = 2.
inline double reduced_line_membership_residual(const ReducedLineProblem& p) {
  const int m = static_cast<int>(p.cameras.size());
  if (m == 2) return 0.0;
  Eigen::MatrixXd R(m, 3);
  for (int i = 0; i < m; ++i) {
    const Vec2& d = p.data[static_cast<size_t>(i)];
    const Mat23& C = p.cameras[static_cast<size_t>(i)];
    Eigen::RowVector3d row = d.y() * C.row(0) - d.x() * C.row(1);
    double scale = d.norm() * C.norm();
    if (scale < 1e-300) throw Error(ErrorCode::kInvalidArgument, "degenerate reduced view");
    R.row(i) = row / scale;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(R);
  return svd.singularValues()(2);
}

// Lift chart coordinates Y (chart (Y_1, Y_2, 1)) back to a spatial line through the
// anchor point.
inline SpatialLine lift_line(const ReducedLineProblem& p, const Vec2& Y) {
  if (!Y.allFinite() || Y.norm() > 1e12)
    throw Error(ErrorCode::kPatchInfinity, "reduced solution lies at patch infinity");
  Vec4 dir = p.point_complement * Vec3(Y.x(), Y.y(), 1.0);
  return SpatialLine(p.anchor.h, dir);
}

}  // namespace linetri
