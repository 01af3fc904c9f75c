#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "constraints.hpp"
#include "projective.hpp"
#include "rng.hpp"

namespace linetri {

namespace detail {

constexpr int kSceneRetries = 64;

inline Camera random_camera(Rng& rng) {
  for (int attempt = 0; attempt < kSceneRetries; ++attempt) {
    Mat34 P;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 4; ++c) P(r, c) = rng.normal();
    try {
      return Camera(P);
    } catch (const Error&) {
      // rank-deficient draw, next attempt
    }
  }
  throw Error(ErrorCode::kDegenerateScene, "could not draw a full-rank camera");
}

inline CameraArrangement random_arrangement(Rng& rng, int m) {
  for (int attempt = 0; attempt < kSceneRetries; ++attempt) {
    std::vector<Camera> cams;
    cams.reserve(static_cast<size_t>(m));
    for (int j = 0; j < m; ++j) cams.push_back(random_camera(rng));
    try {
      return CameraArrangement(std::move(cams));
    } catch (const Error&) {
      // coincident centers, next attempt
    }
  }
  throw Error(ErrorCode::kDegenerateScene, "could not draw a camera arrangement");
}

inline HomPoint3 random_affine_point3(Rng& rng) {
  Vec4 h;
  h << rng.normal(), rng.normal(), rng.normal(), 1.0;
  return HomPoint3(h);
}

// A line clear of every camera center, so that projections are genuine image lines.
inline SpatialLine random_scene_line(Rng& rng, const CameraArrangement& arr) {
  for (int attempt = 0; attempt < kSceneRetries; ++attempt) {
    HomPoint3 a = random_affine_point3(rng);
    HomPoint3 b = random_affine_point3(rng);
    try {
      SpatialLine L(a.h, b.h);
      for (int j = 0; j < arr.size(); ++j) project_line(arr[j], L);
      return L;
    } catch (const Error&) {
      // proportional points or line through a center, next attempt
    }
  }
  throw Error(ErrorCode::kDegenerateScene, "could not draw a line in general position");
}

}  // namespace detail

struct Scene {
  CameraArrangement arrangement;
  SpatialLine line;                 // ground-truth 3D line
  HomPoint3 line_a, line_b;         // the two affine points that span it
  std::vector<HomPoint3> points;    // ground-truth points on the line
  std::uint64_t seed = 0;

  int num_views() const { return arrangement.size(); }
  int num_points() const { return static_cast<int>(points.size()); }

  // Reference length for relative thresholds (incidence flags and the like).
  double scale() const {
    double s = 1.0;
    for (const auto& X : points) s = std::max(s, X.affine().norm());
    return s;
  }
};

// Cameras and line-spanning points are standard normal; the p points sit at uniform
// parameters on the spanning segment extended to twice its length.
inline Scene generate_scene(int m, int p, std::uint64_t seed) {
  if (m < 2) throw Error(ErrorCode::kArityMismatch, "need at least two views");
  if (p < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one point");
  Rng rng = Rng::derive(seed, 0x7363656eULL);  // scene stream
  CameraArrangement arr = detail::random_arrangement(rng, m);
  for (int attempt = 0; attempt < detail::kSceneRetries; ++attempt) {
    Rng line_rng = Rng::derive(seed, 0x6c696e65ULL, static_cast<std::uint64_t>(attempt));
    HomPoint3 a = detail::random_affine_point3(line_rng);
    HomPoint3 b = detail::random_affine_point3(line_rng);
    Scene s{CameraArrangement(arr), SpatialLine(a.h, b.h), a, b, {}, seed};
    try {
      for (int j = 0; j < m; ++j) project_line(arr[j], s.line);
      Vec3 A = a.affine(), B = b.affine();
      Rng pt_rng = Rng::derive(seed, 0x706f696eULL, static_cast<std::uint64_t>(attempt));
      for (int i = 0; i < p; ++i) {
        double theta = pt_rng.uniform(-0.5, 1.5);
        Vec4 h;
        h << A + theta * (B - A), 1.0;
        HomPoint3 X(h);
        for (int j = 0; j < m; ++j) project_point(arr[j], X);  // reject center hits
        s.points.push_back(X);
      }
      return s;
    } catch (const Error&) {
      // degenerate line or a point projecting from a center, redraw the line
    }
  }
  throw Error(ErrorCode::kDegenerateScene, "could not place the scene line");
}

struct NoisyObservation {
  std::vector<PointTrack> point_tracks;  // one per scene point
  LineTrack line_track;                  // observed projections of the line
  double epsilon = 0.0;
};

// Exact projections plus noise vectors of exact length epsilon: in-plane for points,
// on the unit-normalized coefficient vector (then re-normalized) for lines.  The unit
// directions depend only on the scene seed, so runs at different epsilon perturb along
// identical directions.
inline NoisyObservation observe(const Scene& scene, double epsilon) {
  if (epsilon < 0.0) throw Error(ErrorCode::kInvalidArgument, "noise length must be >= 0");
  Rng rng = Rng::derive(scene.seed, 0x6f627365ULL);  // observation stream
  NoisyObservation obs;
  obs.epsilon = epsilon;
  const int m = scene.num_views();
  for (const auto& X : scene.points) {
    PointTrack track;
    for (int j = 0; j < m; ++j) {
      Vec2 q = project_point(scene.arrangement[j], X).affine();
      Vec2 dir = rng.unit_vec<2>();
      track.views.push_back(q + epsilon * dir);
    }
    obs.point_tracks.push_back(std::move(track));
  }
  std::vector<ImageLine> lines;
  for (int j = 0; j < m; ++j) {
    Vec3 l = project_line(scene.arrangement[j], scene.line).c;  // already unit norm
    Vec3 dir = rng.unit_vec<3>();
    lines.push_back(ImageLine(l + epsilon * dir));
  }
  obs.line_track = LineTrack(std::move(lines));
  return obs;
}

}  // namespace linetri
