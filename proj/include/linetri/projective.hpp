#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace linetri {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat23 = Eigen::Matrix<double, 2, 3>;
using Mat24 = Eigen::Matrix<double, 2, 4>;
using Mat34 = Eigen::Matrix<double, 3, 4>;
using Mat42 = Eigen::Matrix<double, 4, 2>;
using Mat43 = Eigen::Matrix<double, 4, 3>;

enum class ErrorCode {
  kArityMismatch,
  kRankDeficiency,
  kCenterProjection,
  kLineThroughCenter,
  kCoincidentCenters,
  kCoincidentPlanes,
  kProportionalPoints,
  kLineInPlane,
  kCenterCoincidence,
  kDegenerateDenominator,
  kPatchInfinity,
  kZeroPolynomial,
  kBadSlicePattern,
  kInvalidArgument,
  kIoError,
  kDegenerateScene,
  kSolverFailure,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::kArityMismatch: return "ArityMismatch";
    case ErrorCode::kRankDeficiency: return "RankDeficiency";
    case ErrorCode::kCenterProjection: return "CenterProjection";
    case ErrorCode::kLineThroughCenter: return "LineThroughCenter";
    case ErrorCode::kCoincidentCenters: return "CoincidentCenters";
    case ErrorCode::kCoincidentPlanes: return "CoincidentPlanes";
    case ErrorCode::kProportionalPoints: return "ProportionalPoints";
    case ErrorCode::kLineInPlane: return "LineInPlane";
    case ErrorCode::kCenterCoincidence: return "CenterCoincidence";
    case ErrorCode::kDegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::kPatchInfinity: return "PatchInfinity";
    case ErrorCode::kZeroPolynomial: return "ZeroPolynomial";
    case ErrorCode::kBadSlicePattern: return "BadSlicePattern";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kDegenerateScene: return "DegenerateScene";
    case ErrorCode::kSolverFailure: return "SolverFailure";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Shared numeric conventions.
constexpr double kRankRelTol = 1e-10;   // sigma < kRankRelTol * sigma_max counts as zero
constexpr double kIncidenceTol = 1e-12; // incidence residuals on unit-normalized inputs
constexpr double kSignEps = 1e-12;      // pivot threshold for the sign convention

// Canonical representative of a homogeneous vector: unit norm, first coordinate with
// |v_i| > kSignEps made positive.  Makes equality checks and file output reproducible.
template <typename Derived>
auto canonical_homogeneous(const Eigen::MatrixBase<Derived>& v_in) {
  auto v = v_in.eval();
  double n = v.norm();
  if (!(n > 1e-300)) throw Error(ErrorCode::kInvalidArgument, "cannot normalize zero vector");
  v /= n;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > kSignEps) {
      if (v[i] < 0) v = -v;
      break;
    }
  }
  return v;
}

// Same convention applied to each column of a matrix.
template <typename Mat>
void fix_column_signs(Mat& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (std::abs(m(i, j)) > kSignEps) {
        if (m(i, j) < 0) m.col(j) = -m.col(j);
        break;
      }
    }
  }
}

// Frobenius-normalized matrix with the sign of the first significant entry
// (column-major order) made positive.
template <typename Mat>
Mat canonical_matrix(const Mat& m_in) {
  Mat m = m_in;
  double n = m.norm();
  if (!(n > 1e-300)) throw Error(ErrorCode::kInvalidArgument, "cannot normalize zero matrix");
  m /= n;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (std::abs(m(i, j)) > kSignEps) {
        if (m(i, j) < 0) m = -m;
        return m;
      }
  return m;
}

inline Mat3 skew3(const Vec3& a) {
  Mat3 s;
  s << 0, -a.z(), a.y(), a.z(), 0, -a.x(), -a.y(), a.x(), 0;
  return s;
}

// Orthonormal basis of the plane orthogonal to v in R^3, returned as rows.
inline Mat23 complement_basis_3(const Vec3& v) {
  Eigen::JacobiSVD<Eigen::Matrix<double, 1, 3>> svd(v.transpose(), Eigen::ComputeFullV);
  Mat3 V = svd.matrixV();
  Mat23 rows;
  rows.row(0) = V.col(1).transpose();
  rows.row(1) = V.col(2).transpose();
  for (int r = 0; r < 2; ++r)
    for (int i = 0; i < 3; ++i)
      if (std::abs(rows(r, i)) > kSignEps) {
        if (rows(r, i) < 0) rows.row(r) = -rows.row(r);
        break;
      }
  return rows;
}

// Orthonormal basis of the hyperplane orthogonal to v in R^4, returned as columns.
inline Mat43 complement_basis_4(const Vec4& v) {
  Eigen::JacobiSVD<Eigen::Matrix<double, 1, 4>> svd(v.transpose(), Eigen::ComputeFullV);
  Eigen::Matrix4d V = svd.matrixV();
  Mat43 cols = V.rightCols<3>();
  fix_column_signs(cols);
  return cols;
}

struct HomPoint2 {
  Vec3 h;
  HomPoint2() : h(0, 0, 1) {}
  explicit HomPoint2(const Vec3& v) : h(canonical_homogeneous(v)) {}
  static HomPoint2 from_affine(const Vec2& a) { return HomPoint2(Vec3(a.x(), a.y(), 1.0)); }
  Vec2 affine() const {
    if (std::abs(h[2]) < 1e-14)
      throw Error(ErrorCode::kPatchInfinity, "image point lies at infinity");
    return h.head<2>() / h[2];
  }
};

struct HomPoint3 {
  Vec4 h;
  HomPoint3() : h(0, 0, 0, 1) {}
  explicit HomPoint3(const Vec4& v) : h(canonical_homogeneous(v)) {}
  static HomPoint3 from_affine(const Vec3& a) { return HomPoint3(Vec4(a.x(), a.y(), a.z(), 1.0)); }
  Vec3 affine() const {
    if (std::abs(h[3]) < 1e-14)
      throw Error(ErrorCode::kPatchInfinity, "space point lies at infinity");
    return h.head<3>() / h[3];
  }
};

// Line in the image plane, coefficients of l^T x = 0.
struct ImageLine {
  Vec3 c;
  ImageLine() : c(1, 0, 0) {}
  explicit ImageLine(const Vec3& v) : c(canonical_homogeneous(v)) {}
};

// Plane in 3-space, coefficients of H^T X = 0.
struct SpatialPlane {
  Vec4 c;
  SpatialPlane() : c(1, 0, 0, 0) {}
  explicit SpatialPlane(const Vec4& v) : c(canonical_homogeneous(v)) {}
};

// Plucker vector (p01, p02, p03, p23, p31, p12) of the line through a and b.
inline Vec6 plucker_from_pair(const Vec4& a, const Vec4& b) {
  Vec6 p;
  p[0] = a[0] * b[1] - a[1] * b[0];  // p01
  p[1] = a[0] * b[2] - a[2] * b[0];  // p02
  p[2] = a[0] * b[3] - a[3] * b[0];  // p03
  p[3] = a[2] * b[3] - a[3] * b[2];  // p23
  p[4] = a[3] * b[1] - a[1] * b[3];  // p31
  p[5] = a[1] * b[2] - a[2] * b[1];  // p12
  return p;
}

// Quadric form whose vanishing characterizes valid Plucker vectors.
inline double plucker_quadric(const Vec6& p) { return p[0] * p[3] + p[1] * p[4] + p[2] * p[5]; }

// Line in 3-space.  Stores an orthonormal spanning pair (columns of `span`, fixed
// deterministically by an SVD of the input pair) plus canonical Plucker coordinates.
struct SpatialLine {
  Mat42 span;
  Vec6 plucker;

  SpatialLine() : SpatialLine(Vec4(1, 0, 0, 0), Vec4(0, 1, 0, 0)) {}

  SpatialLine(const Vec4& a, const Vec4& b) {
    Mat42 m;
    m.col(0) = a;
    m.col(1) = b;
    Eigen::JacobiSVD<Mat42> svd(m, Eigen::ComputeFullU);
    const auto& s = svd.singularValues();
    if (!(s[0] > 0) || s[1] < kRankRelTol * s[0])
      throw Error(ErrorCode::kProportionalPoints, "spanning pair of a line must be independent");
    span = svd.matrixU().leftCols<2>();
    fix_column_signs(span);
    plucker = canonical_homogeneous(plucker_from_pair(span.col(0), span.col(1)));
  }

  static SpatialLine through_points(const HomPoint3& a, const HomPoint3& b) {
    return SpatialLine(a.h, b.h);
  }
};

struct Camera {
  Mat34 P;
  Vec4 center;  // canonical kernel representative

  Camera() : Camera(make_default()) {}

  explicit Camera(const Mat34& m) : P(m) {
    Eigen::JacobiSVD<Mat34> svd(m, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    if (!(s[0] > 0) || s[2] < kRankRelTol * s[0])
      throw Error(ErrorCode::kRankDeficiency, "camera matrix must have full rank");
    center = canonical_homogeneous(Eigen::Vector4d(svd.matrixV().col(3)));
  }

 private:
  static Mat34 make_default() {
    Mat34 m = Mat34::Zero();
    m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
    return m;
  }
};

struct CameraArrangement {
  std::vector<Camera> cams;

  explicit CameraArrangement(std::vector<Camera> cs) : cams(std::move(cs)) {
    if (cams.size() < 2)
      throw Error(ErrorCode::kArityMismatch, "arrangement needs at least two cameras");
    for (size_t i = 0; i < cams.size(); ++i)
      for (size_t j = i + 1; j < cams.size(); ++j) {
        const Vec4& ci = cams[i].center;
        const Vec4& cj = cams[j].center;
        // sine of the angle between the unit kernel representatives
        double s = (cj - ci * ci.dot(cj)).norm();
        if (s < 1e-10)
          throw Error(ErrorCode::kCoincidentCenters, "camera centers must be pairwise distinct");
      }
  }

  int size() const { return static_cast<int>(cams.size()); }
  const Camera& operator[](int i) const { return cams[static_cast<size_t>(i)]; }
};

inline HomPoint2 project_point(const Camera& C, const HomPoint3& X) {
  Vec3 x = C.P * X.h;
  if (x.norm() < kIncidenceTol * C.P.norm())
    throw Error(ErrorCode::kCenterProjection, "point coincides with the camera center");
  return HomPoint2(x);
}

inline ImageLine project_line(const Camera& C, const SpatialLine& L) {
  Vec3 a = C.P * L.span.col(0);
  Vec3 b = C.P * L.span.col(1);
  double scale = C.P.norm();
  if (a.norm() < kIncidenceTol * scale || b.norm() < kIncidenceTol * scale)
    throw Error(ErrorCode::kLineThroughCenter, "line passes through the camera center");
  Vec3 l = a.cross(b);
  if (l.norm() < kIncidenceTol * a.norm() * b.norm())
    throw Error(ErrorCode::kLineThroughCenter, "line passes through the camera center");
  return ImageLine(l);
}

// Ray of all space points projecting to x; always contains the camera center.
inline SpatialLine back_project_point(const Camera& C, const HomPoint2& x) {
  Mat23 W = complement_basis_3(x.h);
  Mat24 B = W * C.P;
  Eigen::JacobiSVD<Mat24> svd(B, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (!(s[0] > 0) || s[1] < kRankRelTol * s[0])
    throw Error(ErrorCode::kRankDeficiency, "degenerate back-projection of an image point");
  return SpatialLine(Vec4(svd.matrixV().col(2)), Vec4(svd.matrixV().col(3)));
}

// Plane of all space points projecting onto the image line l.
inline SpatialPlane back_project_line(const Camera& C, const ImageLine& l) {
  return SpatialPlane(C.P.transpose() * l.c);
}

// Bilinear form with x_i^T F x_j = 0 for corresponding points (x_i in view i).
inline Mat3 fundamental_matrix(const Camera& Ci, const Camera& Cj) {
  Vec3 e = Ci.P * Cj.center;  // epipole in view i
  if (e.norm() < kIncidenceTol * Ci.P.norm())
    throw Error(ErrorCode::kCoincidentCenters, "fundamental matrix needs distinct centers");
  Eigen::Matrix<double, 4, 3> pinv = Cj.P.completeOrthogonalDecomposition().pseudoInverse();
  Mat3 F = skew3(e) * (Ci.P * pinv);
  return canonical_matrix(F);
}

inline SpatialLine line_from_two_planes(const SpatialPlane& H1, const SpatialPlane& H2) {
  Mat24 B;
  B.row(0) = H1.c.transpose();
  B.row(1) = H2.c.transpose();
  Eigen::JacobiSVD<Mat24> svd(B, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (!(s[0] > 0) || s[1] < kRankRelTol * s[0])
    throw Error(ErrorCode::kCoincidentPlanes, "planes must be distinct to meet in a line");
  return SpatialLine(Vec4(svd.matrixV().col(2)), Vec4(svd.matrixV().col(3)));
}

inline SpatialLine line_from_two_points(const HomPoint3& a, const HomPoint3& b) {
  return SpatialLine::through_points(a, b);
}

inline HomPoint3 meet_line_plane(const SpatialLine& L, const SpatialPlane& H) {
  double su = H.c.dot(L.span.col(0));
  double sv = H.c.dot(L.span.col(1));
  Vec4 X = sv * L.span.col(0) - su * L.span.col(1);
  if (X.norm() < kIncidenceTol)
    throw Error(ErrorCode::kLineInPlane, "line lies inside the plane");
  return HomPoint3(X);
}

// Incidence residuals on canonical (unit-normalized) representatives.
inline double incidence(const ImageLine& l, const HomPoint2& x) { return std::abs(l.c.dot(x.h)); }

inline double incidence(const SpatialPlane& H, const HomPoint3& X) {
  return std::abs(H.c.dot(X.h));
}

inline double incidence(const SpatialLine& L, const HomPoint3& X) {
  Vec2 t = L.span.transpose() * X.h;
  return (X.h - L.span * t).norm();
}

inline double incidence(const SpatialPlane& H, const SpatialLine& L) {
  return std::max(std::abs(H.c.dot(L.span.col(0))), std::abs(H.c.dot(L.span.col(1))));
}

// Affine direction of a spatial line (zero last coordinate representative).
inline Vec3 affine_direction(const SpatialLine& L) {
  Vec4 w = L.span(3, 0) * L.span.col(1) - L.span(3, 1) * L.span.col(0);
  Vec3 d = w.head<3>();
  if (d.norm() < 1e-14)
    throw Error(ErrorCode::kPatchInfinity, "line lies in the plane at infinity");
  return d / d.norm();
}

// Some affine point on the line.
inline Vec3 affine_base(const SpatialLine& L) {
  Vec4 b = std::abs(L.span(3, 0)) >= std::abs(L.span(3, 1)) ? L.span.col(0) : L.span.col(1);
  if (std::abs(b[3]) < 1e-14)
    throw Error(ErrorCode::kPatchInfinity, "line lies in the plane at infinity");
  return b.head<3>() / b[3];
}

// Euclidean distance from an affine point to the affine trace of a spatial line.
inline double point_to_line_distance(const SpatialLine& L, const Vec3& y) {
  Vec3 d = affine_direction(L);
  Vec3 r = y - affine_base(L);
  return (r - d * d.dot(r)).norm();
}

}  // namespace linetri
