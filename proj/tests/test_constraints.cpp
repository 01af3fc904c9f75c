#include <linetri/constraints.hpp>
#include <linetri/rng.hpp>

#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace linetri;
using testutil::random_affine_line;
using testutil::random_affine_point;
using testutil::random_arrangement;

namespace {

PointTrack observe_point(const CameraArrangement& arr, const HomPoint3& X) {
  std::vector<Vec2> v;
  for (int j = 0; j < arr.size(); ++j) v.push_back(project_point(arr[j], X).affine());
  return PointTrack(std::move(v));
}

LineTrack observe_line(const CameraArrangement& arr, const SpatialLine& L) {
  std::vector<ImageLine> v;
  for (int j = 0; j < arr.size(); ++j) v.push_back(project_line(arr[j], L));
  return LineTrack(std::move(v));
}

HomPoint3 point_on(const SpatialLine& L, double t0, double t1) {
  return HomPoint3(Vec4(t0 * L.span.col(0) + t1 * L.span.col(1)));
}

}  // namespace

TEST(PointMembership, ExactTrackPasses) {
  Rng rng(401);
  for (int m = 2; m <= 4; ++m) {
    for (int rep = 0; rep < 30; ++rep) {
      CameraArrangement arr = random_arrangement(m, rng);
      ResidualReport rep_r = point_mv_residuals(arr, observe_point(arr, random_affine_point(rng)));
      EXPECT_TRUE(rep_r.pass) << "m=" << m << " max=" << rep_r.max_residual;
      EXPECT_EQ(static_cast<int>(rep_r.residuals.size()), m - 1);
      EXPECT_LE(rep_r.max_residual, 1e-10);
    }
  }
}

// Perturbing one observation along the epipolar gradient direction must raise the
// residual by about eps * |gradient|; the constant is computed per instance.
TEST(PointMembership, GradientPerturbationIsDetected) {
  Rng rng(411);
  const double eps = 1e-6;
  for (int rep = 0; rep < 50; ++rep) {
    CameraArrangement arr = random_arrangement(3, rng);
    PointTrack track = observe_point(arr, random_affine_point(rng));
    Mat3 F = fundamental_matrix(arr[0], arr[1]);
    Vec3 x1 = HomPoint2::from_affine(track.views[0]).h;
    Vec2 grad = (F.transpose() * x1).head<2>();
    if (grad.norm() < 1e-6) continue;  // epipole hits the observation: skip degenerate draw
    track.views[1] += eps * grad.normalized();
    double lift_norm = HomPoint2::from_affine(track.views[1]).h.norm();  // = 1 (canonical)
    ASSERT_NEAR(lift_norm, 1.0, 1e-14);
    double expected = eps * grad.norm() / Vec3(track.views[1].x(), track.views[1].y(), 1.0).norm();
    ResidualReport r = point_mv_residuals(arr, track);
    EXPECT_FALSE(r.pass);
    EXPECT_GT(r.max_residual, 0.3 * expected);
  }
}

TEST(PointMembership, ArityMismatchRejected) {
  Rng rng(421);
  CameraArrangement arr = random_arrangement(3, rng);
  PointTrack track(std::vector<Vec2>{Vec2(0, 0), Vec2(1, 1)});
  try {
    point_mv_residuals(arr, track);
    FAIL() << "expected throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kArityMismatch);
  }
}

TEST(AnchoredPointMembership, ExactTrackOnLinePasses) {
  Rng rng(431);
  for (int m = 2; m <= 4; ++m) {
    for (int rep = 0; rep < 30; ++rep) {
      CameraArrangement arr = random_arrangement(m, rng);
      SpatialLine L = random_affine_line(rng);
      HomPoint3 X = point_on(L, rng.normal(), rng.normal());
      ResidualReport r = anchored_point_residuals(arr, L, observe_point(arr, X));
      EXPECT_TRUE(r.pass) << "m=" << m << " max=" << r.max_residual;
      // residual budget: (m-1) epipolar + m incidence
      EXPECT_EQ(static_cast<int>(r.residuals.size()), 2 * m - 1);
    }
  }
}

TEST(AnchoredPointMembership, OffLinePointFailsIncidence) {
  Rng rng(441);
  for (int rep = 0; rep < 30; ++rep) {
    CameraArrangement arr = random_arrangement(3, rng);
    SpatialLine L = random_affine_line(rng);
    HomPoint3 X = random_affine_point(rng);  // generic: off the line
    ResidualReport r = anchored_point_residuals(arr, L, observe_point(arr, X));
    EXPECT_FALSE(r.pass);
  }
}

TEST(LineMembership, ExactTrackPassesAndCountsMatch) {
  Rng rng(451);
  for (int m = 2; m <= 5; ++m) {
    for (int rep = 0; rep < 20; ++rep) {
      CameraArrangement arr = random_arrangement(m, rng);
      SpatialLine L = random_affine_line(rng);
      ResidualReport r = line_mv_residuals(arr, observe_line(arr, L));
      EXPECT_TRUE(r.pass) << "m=" << m << " max=" << r.max_residual;
      EXPECT_EQ(static_cast<int>(r.residuals.size()), m == 2 ? 0 : 2 * (m - 2));
    }
  }
}

TEST(LineMembership, UnrelatedLinesFail) {
  Rng rng(461);
  int fails = 0, total = 0;
  for (int rep = 0; rep < 30; ++rep) {
    CameraArrangement arr = random_arrangement(4, rng);
    std::vector<ImageLine> views;
    for (int j = 0; j < 4; ++j) views.push_back(ImageLine(rng.normal_vec<3>()));
    ResidualReport r = line_mv_residuals(arr, LineTrack(std::move(views)));
    ++total;
    if (!r.pass) ++fails;
  }
  EXPECT_EQ(fails, total);
}

TEST(AnchoredLineMembership, ExactTrackThroughPointPasses) {
  Rng rng(471);
  for (int m = 2; m <= 4; ++m) {
    for (int rep = 0; rep < 30; ++rep) {
      CameraArrangement arr = random_arrangement(m, rng);
      HomPoint3 X = random_affine_point(rng);
      HomPoint3 B = random_affine_point(rng);
      SpatialLine L = SpatialLine::through_points(X, B);
      ResidualReport r = anchored_line_residuals(arr, X, observe_line(arr, L));
      EXPECT_TRUE(r.pass) << "m=" << m << " max=" << r.max_residual;
      // residual budget: 2(m-2) triples + m incidence (triples vacuous at m = 2)
      int expected = (m == 2 ? 0 : 2 * (m - 2)) + m;
      EXPECT_EQ(static_cast<int>(r.residuals.size()), expected);
    }
  }
}

TEST(AnchoredLineMembership, LineMissingThePointFails) {
  Rng rng(481);
  for (int rep = 0; rep < 30; ++rep) {
    CameraArrangement arr = random_arrangement(3, rng);
    HomPoint3 X = random_affine_point(rng);
    SpatialLine L = random_affine_line(rng);  // generic: misses X
    ResidualReport r = anchored_line_residuals(arr, X, observe_line(arr, L));
    EXPECT_FALSE(r.pass);
  }
}

TEST(AnchoredLineMembership, PerturbedViewDetected) {
  Rng rng(491);
  int detected = 0, total = 0;
  for (int rep = 0; rep < 30; ++rep) {
    CameraArrangement arr = random_arrangement(4, rng);
    HomPoint3 X = random_affine_point(rng);
    SpatialLine L = SpatialLine::through_points(X, random_affine_point(rng));
    LineTrack track = observe_line(arr, L);
    track.views[3] = ImageLine(track.views[3].c + 1e-6 * rng.unit_vec<3>());
    ResidualReport r = anchored_line_residuals(arr, X, track);
    ++total;
    if (!r.pass && r.max_residual > 1e-9) ++detected;
  }
  EXPECT_EQ(detected, total);
}

TEST(LineTrack, LineAtInfinityRejected) {
  try {
    LineTrack t(std::vector<ImageLine>{ImageLine(Vec3(0, 0, 1))});
    FAIL() << "expected throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}
