#include <linetri/projective.hpp>
#include <linetri/rng.hpp>

#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace linetri;
using testutil::random_affine_line;
using testutil::random_affine_point;
using testutil::random_arrangement;
using testutil::random_camera;

TEST(CanonicalForm, ScaleAndSignInvariant) {
  Rng rng(11);
  for (int rep = 0; rep < 100; ++rep) {
    Vec4 v = rng.normal_vec<4>();
    double s = rng.uniform(0.1, 10.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    Vec4 a = canonical_homogeneous(v);
    Vec4 b = canonical_homogeneous((s * v).eval());
    EXPECT_LT((a - b).norm(), 1e-12);
    EXPECT_NEAR(a.norm(), 1.0, 1e-14);
  }
}

TEST(CanonicalForm, SignPivotSkipsTinyLeadingEntries) {
  Vec3 v(1e-15, -3.0, 4.0);
  Vec3 c = canonical_homogeneous(v);
  EXPECT_GT(c[1], 0.0);  // pivot is the -3 entry, so the vector flips
}

TEST(CanonicalForm, ZeroVectorRejected) {
  try {
    canonical_homogeneous(Vec4::Zero().eval());
    FAIL() << "expected throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(Camera, CenterLiesInKernel) {
  Rng rng(21);
  for (int rep = 0; rep < 100; ++rep) {
    Camera C = random_camera(rng);
    EXPECT_LT((C.P * C.center).norm(), 1e-12 * C.P.norm());
    EXPECT_NEAR(C.center.norm(), 1.0, 1e-14);
  }
}

TEST(Camera, RankDeficientRejected) {
  Mat34 m = Mat34::Zero();
  m(0, 0) = 1.0;
  m(1, 1) = 1.0;  // rank 2
  try {
    Camera c(m);
    FAIL() << "expected throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRankDeficiency);
  }
}

TEST(Camera, DeterministicCenter) {
  Rng rng(31);
  Mat34 m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) m(r, c) = rng.normal();
  Camera a(m), b(m);
  EXPECT_EQ(a.center, b.center);  // bitwise
}

TEST(Arrangement, RejectsTooFewCameras) {
  Rng rng(41);
  std::vector<Camera> one = {random_camera(rng)};
  try {
    CameraArrangement arr(one);
    FAIL() << "expected throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kArityMismatch);
  }
}

TEST(Arrangement, RejectsCoincidentCenters) {
  Rng rng(51);
  Camera a = random_camera(rng);
  Mat3 A = Mat3::Identity();
  A(0, 1) = 0.7;
  A(2, 0) = -0.3;
  Camera b(Mat34(A * a.P));  // same center, different matrix
  try {
    CameraArrangement arr({a, b});
    FAIL() << "expected throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCoincidentCenters);
  }
}

TEST(SpatialLine, PluckerQuadricHolds) {
  Rng rng(61);
  for (int rep = 0; rep < 100; ++rep) {
    SpatialLine L(rng.normal_vec<4>(), rng.normal_vec<4>());
    EXPECT_LT(std::abs(plucker_quadric(L.plucker)), 1e-12);
    EXPECT_NEAR(L.plucker.norm(), 1.0, 1e-14);
    // span is orthonormal
    Mat2 G = L.span.transpose() * L.span;
    EXPECT_LT((G - Mat2::Identity()).norm(), 1e-13);
  }
}

TEST(SpatialLine, PluckerInvariantUnderSpanChange) {
  Rng rng(71);
  for (int rep = 0; rep < 100; ++rep) {
    Vec4 a = rng.normal_vec<4>(), b = rng.normal_vec<4>();
    SpatialLine L1(a, b);
    // random invertible recombination of the spanning pair
    double w = rng.uniform(0.2, 2.0), x = rng.uniform(-2.0, 2.0);
    double y = rng.uniform(-2.0, 2.0), z = rng.uniform(0.2, 2.0);
    if (std::abs(w * z - x * y) < 0.05) continue;
    SpatialLine L2(w * a + x * b, y * a + z * b);
    EXPECT_LT((L1.plucker - L2.plucker).norm(), 1e-10);
  }
}

TEST(SpatialLine, ProportionalPointsRejected) {
  Vec4 a(1, 2, 3, 4);
  try {
    SpatialLine L(a, Vec4(-2 * a));
    FAIL() << "expected throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kProportionalPoints);
  }
}

TEST(Projection, PointProjectionMatchesDirectProduct) {
  Rng rng(81);
  for (int rep = 0; rep < 100; ++rep) {
    Camera C = random_camera(rng);
    HomPoint3 X = random_affine_point(rng);
    HomPoint2 x = project_point(C, X);
    Vec3 direct = canonical_homogeneous((C.P * X.h).eval());
    EXPECT_LT((x.h - direct).norm(), 1e-15);
  }
}

TEST(Projection, CenterProjectionRejected) {
  Rng rng(91);
  Camera C = random_camera(rng);
  try {
    project_point(C, HomPoint3(C.center));
    FAIL() << "expected throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCenterProjection);
  }
}

TEST(Projection, LineProjectionContainsProjectedPoints) {
  Rng rng(101);
  for (int rep = 0; rep < 100; ++rep) {
    Camera C = random_camera(rng);
    HomPoint3 A = random_affine_point(rng), B = random_affine_point(rng);
    SpatialLine L = SpatialLine::through_points(A, B);
    ImageLine l = project_line(C, L);
    EXPECT_LT(incidence(l, project_point(C, A)), 1e-12);
    EXPECT_LT(incidence(l, project_point(C, B)), 1e-12);
  }
}

TEST(Projection, LineThroughCenterRejected) {
  Rng rng(111);
  Camera C = random_camera(rng);
  HomPoint3 A = random_affine_point(rng);
  SpatialLine L(C.center, A.h);
  try {
    project_line(C, L);
    FAIL() << "expected throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLineThroughCenter);
  }
}

TEST(BackProjection, RayContainsPointAndCenter) {
  Rng rng(121);
  for (int rep = 0; rep < 100; ++rep) {
    Camera C = random_camera(rng);
    HomPoint3 X = random_affine_point(rng);
    SpatialLine ray = back_project_point(C, project_point(C, X));
    EXPECT_LT(incidence(ray, X), 1e-10);
    EXPECT_LT(incidence(ray, HomPoint3(C.center)), 1e-10);
  }
}

TEST(BackProjection, PlaneContainsLine) {
  Rng rng(131);
  for (int rep = 0; rep < 100; ++rep) {
    Camera C = random_camera(rng);
    SpatialLine L = random_affine_line(rng);
    SpatialPlane H = back_project_line(C, project_line(C, L));
    EXPECT_LT(incidence(H, L), 1e-10);
    EXPECT_LT(incidence(H, HomPoint3(C.center)), 1e-10);
  }
}

TEST(FundamentalMatrix, BilinearFormVanishesOnCorrespondences) {
  Rng rng(141);
  for (int rep = 0; rep < 100; ++rep) {
    Camera Ci = random_camera(rng), Cj = random_camera(rng);
    Mat3 F = fundamental_matrix(Ci, Cj);
    for (int k = 0; k < 5; ++k) {
      HomPoint3 X = random_affine_point(rng);
      double r = std::abs(project_point(Ci, X).h.dot(F * project_point(Cj, X).h));
      EXPECT_LT(r, 1e-10);
    }
  }
}

TEST(FundamentalMatrix, RankTwo) {
  Rng rng(151);
  for (int rep = 0; rep < 50; ++rep) {
    Camera Ci = random_camera(rng), Cj = random_camera(rng);
    Mat3 F = fundamental_matrix(Ci, Cj);
    Eigen::JacobiSVD<Mat3> svd(F);
    const auto& s = svd.singularValues();
    EXPECT_LT(s[2], 1e-10 * s[0]);
    EXPECT_GT(s[1], 1e-6 * s[0]);
  }
}

TEST(FundamentalMatrix, SwapGivesTranspose) {
  Rng rng(161);
  for (int rep = 0; rep < 50; ++rep) {
    Camera Ci = random_camera(rng), Cj = random_camera(rng);
    Mat3 F = fundamental_matrix(Ci, Cj);
    Mat3 G = fundamental_matrix(Cj, Ci);
    Mat3 Ft = canonical_matrix(Mat3(F.transpose()));
    EXPECT_LT((Ft - G).norm(), 1e-10);
  }
}

TEST(FundamentalMatrix, CoincidentCentersRejected) {
  Rng rng(171);
  Camera a = random_camera(rng);
  Mat3 A = Mat3::Identity();
  A(1, 2) = 0.4;
  Camera b(Mat34(A * a.P));
  try {
    fundamental_matrix(a, b);
    FAIL() << "expected throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCoincidentCenters);
  }
}

TEST(Meets, LineFromTwoPlanesIsIncident) {
  Rng rng(181);
  for (int rep = 0; rep < 100; ++rep) {
    SpatialPlane H1(rng.normal_vec<4>()), H2(rng.normal_vec<4>());
    SpatialLine L = line_from_two_planes(H1, H2);
    EXPECT_LT(incidence(H1, L), 1e-10);
    EXPECT_LT(incidence(H2, L), 1e-10);
  }
}

TEST(Meets, CoincidentPlanesRejected) {
  Vec4 h(0.3, -1.2, 0.5, 2.0);
  try {
    line_from_two_planes(SpatialPlane(h), SpatialPlane(Vec4(3.0 * h)));
    FAIL() << "expected throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCoincidentPlanes);
  }
}

// Oracle: recover the meet point as the kernel of [q1 q2 H]^T where q1, q2 span the
// orthogonal complement of the line's span (two independent planes through the line).
TEST(Meets, LinePlaneMeetMatchesLinearSolveOracle) {
  Rng rng(191);
  for (int rep = 0; rep < 100; ++rep) {
    SpatialLine L = random_affine_line(rng);
    SpatialPlane H(rng.normal_vec<4>());
    HomPoint3 X = meet_line_plane(L, H);
    EXPECT_LT(incidence(H, X), 1e-12);
    EXPECT_LT(incidence(L, X), 1e-12);

    Eigen::JacobiSVD<Mat42> comp(L.span, Eigen::ComputeFullU);
    Eigen::Matrix<double, 3, 4> S;
    S.row(0) = comp.matrixU().col(2).transpose();
    S.row(1) = comp.matrixU().col(3).transpose();
    S.row(2) = H.c.transpose();
    Eigen::JacobiSVD<Eigen::Matrix<double, 3, 4>> svd(S, Eigen::ComputeFullV);
    Vec4 oracle = canonical_homogeneous(Vec4(svd.matrixV().col(3)));
    EXPECT_LT((X.h - oracle).norm(), 1e-10);
  }
}

TEST(Meets, LineInPlaneRejected) {
  Rng rng(201);
  HomPoint3 A = random_affine_point(rng), B = random_affine_point(rng);
  SpatialLine L = SpatialLine::through_points(A, B);
  // plane through the whole line: kernel direction of the span complement
  Eigen::JacobiSVD<Mat42> comp(L.span, Eigen::ComputeFullU);
  SpatialPlane H(Vec4(comp.matrixU().col(2)));
  try {
    meet_line_plane(L, H);
    FAIL() << "expected throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLineInPlane);
  }
}

TEST(AffineHelpers, DistanceMatchesParametricOracle) {
  Rng rng(211);
  for (int rep = 0; rep < 100; ++rep) {
    Vec3 a = rng.normal_vec<3>(), b = rng.normal_vec<3>();
    if ((a - b).norm() < 1e-3) continue;
    SpatialLine L = SpatialLine::through_points(HomPoint3::from_affine(a), HomPoint3::from_affine(b));
    Vec3 y = rng.normal_vec<3>();
    // brute-force projection onto the segment parameterization
    Vec3 d = (b - a).normalized();
    double expected = ((y - a) - d * d.dot(y - a)).norm();
    EXPECT_NEAR(point_to_line_distance(L, y), expected, 1e-10);
  }
}

TEST(Determinism, RepeatedConstructionIsBitwiseStable) {
  Rng rng1(221), rng2(221);
  for (int rep = 0; rep < 20; ++rep) {
    Camera A = random_camera(rng1);
    Camera B = random_camera(rng2);
    EXPECT_EQ(A.P, B.P);
    EXPECT_EQ(A.center, B.center);
    SpatialLine L1 = random_affine_line(rng1);
    SpatialLine L2 = random_affine_line(rng2);
    EXPECT_EQ(L1.span, L2.span);
    EXPECT_EQ(L1.plucker, L2.plucker);
  }
}
