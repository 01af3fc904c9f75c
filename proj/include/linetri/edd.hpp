#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "critical.hpp"
#include "objectives.hpp"
#include "reduction.hpp"
#include "scene.hpp"
#include "tracker.hpp"

namespace linetri {

// A candidate root of a cleared critical system counts as a critical point only if the
// original rational gradient vanishes there in the backward sense.
constexpr double kCriticalGradTol = 1e-6;

// After polishing on the rational gradient a genuine critical point sits at rounding
// level; spurious clearing artifacts stay orders of magnitude above.
constexpr double kRefinedGradTol = 1e-9;

// The objective tends to a constant along generic directions to infinity, so its
// gradient decays like 1/|x|^2 and the relative gradient test passes vacuously for
// far-away points.  Beyond this radius a candidate cannot be distinguished from the
// asymptotic continuum at double precision and is rejected.
constexpr double kCriticalNormCap = 1e6;

// Verified critical points of one instance stay at least ~1e-1 apart, while polished
// duplicates of a single point scatter by up to ~1e-7 relative: the polish stalls at
// the gradient's rounding floor, which an ill-conditioned Hessian (rcond ~ 1e-5 near
// the discriminant of the data) smears into position error well above rounding.  The
// merge radius sits between the two regimes.
constexpr double kCriticalMergeTol = 1e-6;

// Newton starts per singular center in the capture sweep.
constexpr int kSweepSamples = 768;

// One homotopy can lose a path into a singular cluster of the cleared system; fresh
// gamma and patch draws route the paths differently and the union of verified
// critical points settles quickly.
constexpr int kMaxHomotopyRestarts = 8;

enum class VarietyKind { kAnchoredPoint, kAnchoredLine, kPointMv };

inline const char* variety_name(VarietyKind k) {
  switch (k) {
    case VarietyKind::kAnchoredPoint: return "anchored-point";
    case VarietyKind::kAnchoredLine: return "anchored-line";
    case VarietyKind::kPointMv: return "point-mv";
  }
  return "?";
}

// Closed-form generic critical-point counts for the three fitting problems.
inline int expected_edd(VarietyKind kind, int m) {
  if (m < 2) throw Error(ErrorCode::kArityMismatch, "need at least two views");
  switch (kind) {
    case VarietyKind::kAnchoredPoint:
      return 3 * m - 2;
    case VarietyKind::kAnchoredLine:
      return (9 * m * m - 19 * m + 6) / 2;
    case VarietyKind::kPointMv:
      return (9 * m * m * m - 21 * m * m + 16 * m - 8) / 2;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown variety kind");
}

struct CountStats {
  VarietyKind kind = VarietyKind::kAnchoredPoint;
  int m = 0;
  int trials = 0;
  int expected = 0;
  std::vector<int> counts;        // per trial
  int modal = 0;                  // most frequent count
  double agreement = 0.0;         // fraction of trials at the modal count
  double agreement_expected = 0.0;  // fraction at the closed-form count
  int total_path_failures = 0;    // tracker paths that died unresolved
};

namespace detail {

inline void finalize_counts(CountStats& st) {
  std::map<int, int> freq;
  for (int c : st.counts) ++freq[c];
  int best = -1;
  for (const auto& [count, n] : freq)
    if (n > best) {
      best = n;
      st.modal = count;
    }
  int at_modal = 0, at_expected = 0;
  for (int c : st.counts) {
    if (c == st.modal) ++at_modal;
    if (c == st.expected) ++at_expected;
  }
  st.agreement = st.counts.empty() ? 0.0 : double(at_modal) / double(st.counts.size());
  st.agreement_expected =
      st.counts.empty() ? 0.0 : double(at_expected) / double(st.counts.size());
}

// Verify a candidate against the rational objective itself: polish on the rational
// gradient, then require the backward residual at rounding level off the denominator
// zero set.  Membership is intrinsic to the polished point, not to the path that
// delivered it -- a polish that relocates onto some other critical point still lands
// on a genuine one, and the caller's deduplication collapses such collisions.  On
// success x is replaced by the polished point so duplicates coincide to rounding.
inline bool is_rational_critical(const RationalObjective& obj, VecXc& x) {
  if (!(obj.min_denominator(x) > kDenominatorTol)) return false;
  VecXc y = obj.refine_critical(x);
  if (!(y.norm() <= kCriticalNormCap)) return false;
  if (!(obj.min_denominator(y) > kDenominatorTol)) return false;
  if (!(obj.gradient_backward_residual(y) <= kRefinedGradTol)) return false;
  x = y;
  return true;
}

// Generic complex data: replaces every observation channel by a standard complex
// Gaussian.  Counting over C needs data off all real-geometry coincidences.
inline void randomize_data(RationalObjective& obj, Rng& rng) {
  for (auto& v : obj.views)
    for (Eigen::Index c = 0; c < v.w.size(); ++c) v.w[c] = rng.normal_complex();
}

// At generic complex data some critical points press hard against the denominator
// zero set (min |d_v| down to ~1e-6), and there the cleared polynomial system
// localizes its roots no better than ~1e-5, so homotopy endpoints can land outside the
// basin no matter the gamma.  Such points cluster around the singular centers of the
// objective: each view's base point, where the view's numerator channels vanish
// together with its denominator, and each square intersection of denominator walls.
// Multiscale Newton starts around every center capture them; undamped steps enter the
// stiff basins that least-squares polishing cannot.
inline void sweep_singular_centers(const RationalObjective& obj, Rng& rng,
                                   std::vector<VecXc>& candidates) {
  const int n = obj.nvars;
  std::vector<VecXc> centers;
  auto add_center = [&](const Eigen::MatrixXcd& A, const VecXc& b) {
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(A);
    if (!lu.isInvertible()) return;
    VecXc c = lu.solve(b);
    if (c.allFinite() && c.norm() < kCriticalNormCap) centers.push_back(std::move(c));
  };

  for (const auto& v : obj.views) {
    if (static_cast<int>(v.w.size()) + 1 != n) continue;
    Eigen::MatrixXcd A(n, n);
    VecXc b(n);
    for (Eigen::Index c = 0; c < v.w.size(); ++c) {
      A.row(c) = v.N.row(c);
      b[c] = -v.nb[c];
    }
    A.row(n - 1) = v.g.transpose();
    b[n - 1] = -v.h;
    add_center(A, b);
  }

  const int m = obj.num_views();
  if (m >= n) {
    std::vector<int> pick(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) pick[static_cast<size_t>(i)] = i;
    while (true) {
      Eigen::MatrixXcd A(n, n);
      VecXc b(n);
      for (int r = 0; r < n; ++r) {
        const auto& v = obj.views[static_cast<size_t>(pick[static_cast<size_t>(r)])];
        A.row(r) = v.g.transpose();
        b[r] = -v.h;
      }
      add_center(A, b);
      int j = n - 1;
      while (j >= 0 && pick[static_cast<size_t>(j)] == m - n + j) --j;
      if (j < 0) break;
      ++pick[static_cast<size_t>(j)];
      for (int k = j + 1; k < n; ++k)
        pick[static_cast<size_t>(k)] = pick[static_cast<size_t>(k - 1)] + 1;
    }
  }

  for (const VecXc& c : centers) {
    for (int s = 0; s < kSweepSamples; ++s) {
      double rad = std::pow(10.0, rng.uniform(-8.0, -0.3)) * (1.0 + c.norm());
      VecXc x = c;
      for (Eigen::Index k = 0; k < x.size(); ++k) x[k] += rad * rng.normal_complex();
      for (int it = 0; it < 40; ++it) {
        VecXc G = obj.gradient(x);
        Eigen::MatrixXcd H = obj.hessian(x);
        VecXc step = H.fullPivLu().solve(-G);
        if (!step.allFinite()) break;
        x += step;
        if (!x.allFinite() || x.norm() > 1e3 * kCriticalNormCap) break;
        if (step.norm() < 1e-12 * std::max(1.0, x.norm())) break;
      }
      if (!x.allFinite() || x.norm() > kCriticalNormCap) continue;
      if (!(obj.gradient_backward_residual(x) <= kCriticalGradTol)) continue;
      bool dup = false;
      for (const VecXc& y : candidates)
        if ((x - y).norm() <= kCriticalMergeTol * (1.0 + y.norm())) {
          dup = true;
          break;
        }
      if (!dup) candidates.push_back(std::move(x));
    }
  }
}

inline int count_anchored_point_trial(int m, std::uint64_t seed, int trial) {
  for (int attempt = 0; attempt < kSceneRetries; ++attempt) {
    Rng rng = Rng::derive(Rng::mix(seed, 0xA11C0), static_cast<std::uint64_t>(trial),
                          static_cast<std::uint64_t>(attempt));
    try {
      CameraArrangement arr = random_arrangement(rng, m);
      SpatialLine L = random_scene_line(rng, arr);
      Vec4 h = L.span * Vec2(rng.uniform(-1.0, 1.0), 1.0);
      HomPoint3 X(h);
      PointTrack track;
      for (int j = 0; j < m; ++j)
        track.views.push_back(project_point(arr[j], X).affine());
      ReducedPointProblem prob = reduce_anchored_point(arr, L, track);
      RationalObjective obj = make_objective_anchored_point_reduced(prob);
      randomize_data(obj, rng);
      UnivariateCritical sys = build_anchored_point_system(obj);
      UnivariateRoots roots = solve_univariate(sys.poly);
      std::vector<Cplx> kept;
      for (const Cplx& t : roots.roots) {
        VecXc x(1);
        x[0] = t;
        if (!is_rational_critical(obj, x)) continue;
        bool dup = false;
        for (const Cplx& s : kept)
          if (std::abs(x[0] - s) <= 1e-8 * std::max(1.0, std::abs(s))) dup = true;
        if (!dup) kept.push_back(x[0]);
      }
      return static_cast<int>(kept.size());
    } catch (const Error&) {
      // degenerate draw; try again with a fresh substream
    }
  }
  throw Error(ErrorCode::kDegenerateScene, "anchored-point count: no generic instance found");
}

inline int count_tracked_trial(VarietyKind kind, int m, std::uint64_t seed, int trial,
                               const TrackerConfig& base, int* failures) {
  const std::uint64_t tag = (kind == VarietyKind::kAnchoredLine) ? 0xA11C1 : 0xA11C2;
  for (int attempt = 0; attempt < kSceneRetries; ++attempt) {
    Rng rng = Rng::derive(Rng::mix(seed, tag), static_cast<std::uint64_t>(trial),
                          static_cast<std::uint64_t>(attempt));
    try {
      CameraArrangement arr = random_arrangement(rng, m);
      RationalObjective obj;
      if (kind == VarietyKind::kAnchoredLine) {
        HomPoint3 X = random_affine_point3(rng);
        HomPoint3 B = random_affine_point3(rng);
        SpatialLine L(X.h, B.h);
        std::vector<ImageLine> lines;
        for (int i = 0; i < m; ++i) lines.push_back(project_line(arr[i], L));
        LineTrack track(std::move(lines));
        ReducedLineProblem prob = reduce_anchored_line(arr, X, track);
        obj = make_objective_anchored_line_reduced(prob);
      } else {
        HomPoint3 X = random_affine_point3(rng);
        PointTrack track;
        for (int j = 0; j < m; ++j)
          track.views.push_back(project_point(arr[j], X).affine());
        obj = make_objective_point_mv(arr, track);
      }
      randomize_data(obj, rng);
      CriticalSystem sys = (kind == VarietyKind::kAnchoredLine)
                               ? build_anchored_line_system(obj)
                               : build_point_mv_system(obj);
      std::vector<VecXc> kept;
      auto admit = [&](VecXc x) {
        if (!is_rational_critical(obj, x)) return false;
        for (const VecXc& y : kept)
          if ((x - y).norm() <= kCriticalMergeTol * (1.0 + y.norm())) return false;
        kept.push_back(std::move(x));
        return true;
      };

      // Gamma-independent capture pass first: wall-hugging critical points that no
      // endpoint reaches are picked up around the singular centers.
      Rng sweep_rng =
          Rng::derive(Rng::mix(seed, tag), static_cast<std::uint64_t>(trial), 0x5AFEull);
      std::vector<VecXc> sweep;
      sweep_singular_centers(obj, sweep_rng, sweep);
      for (VecXc& x : sweep) admit(std::move(x));

      int stale = 0;
      for (int run = 0; run < kMaxHomotopyRestarts && stale < 2; ++run) {
        TrackerConfig cfg = base;
        cfg.seed = Rng::mix(Rng::mix(Rng::mix(seed, tag), static_cast<std::uint64_t>(trial)),
                            static_cast<std::uint64_t>(run));
        CriticalPointSet set = track_paths(sys, cfg);
        if (failures) *failures += set.num_failed;
        // Endpoint classification is advisory only: near-singular and even failed
        // endpoints often sit one polish away from a genuine critical point, so every
        // finite endpoint of the right arity goes to the verifier, and membership is
        // decided by the rational gradient alone.
        bool grew = false;
        for (const auto& p : set.paths) {
          if (p.x.size() != static_cast<Eigen::Index>(sys.nvars)) continue;
          if (!p.x.allFinite() || p.x.norm() > 1e3 * kCriticalNormCap) continue;
          VecXc x = p.x;
          grew = admit(std::move(x)) || grew;
        }
        stale = grew ? 0 : stale + 1;
      }
      return static_cast<int>(kept.size());
    } catch (const Error&) {
      // degenerate draw; try again with a fresh substream
    }
  }
  throw Error(ErrorCode::kDegenerateScene, "critical count: no generic instance found");
}

}  // namespace detail

// Monte-Carlo verification of the critical-point counts: random real arrangements and
// anchors, generic complex data, exact root counting after rational-gradient filtering.
inline CountStats count_edd(VarietyKind kind, int m, int trials, std::uint64_t seed,
                            const TrackerConfig& base_cfg = {}) {
  if (trials < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one trial");
  CountStats st;
  st.kind = kind;
  st.m = m;
  st.trials = trials;
  st.expected = expected_edd(kind, m);
  for (int tr = 0; tr < trials; ++tr) {
    if (kind == VarietyKind::kAnchoredPoint) {
      st.counts.push_back(detail::count_anchored_point_trial(m, seed, tr));
    } else {
      st.counts.push_back(
          detail::count_tracked_trial(kind, m, seed, tr, base_cfg, &st.total_path_failures));
    }
  }
  detail::finalize_counts(st);
  return st;
}

}  // namespace linetri
