#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "critical.hpp"
#include "polynomial.hpp"
#include "rng.hpp"

namespace linetri {

struct TrackerConfig {
  double initial_step = 0.1;
  double min_step = 1e-7;
  double newton_tol = 1e-11;
  int max_corrector_iters = 3;
  double infinity_threshold = 1e8;
  double dedup_tol = 1e-8;
  double endpoint_residual_tol = 1e-10;
  double singular_rcond = 1e-8;
  int max_steps_per_path = 20000;
  int successes_before_growth = 4;
  std::uint64_t seed = 0;  // gamma/patch draws; vary per run for fresh homotopies
  int threads = 1;
};

enum class PathStatus { kFiniteRegular, kNearSingular, kAtInfinity, kFailed };

struct PathResult {
  VecXc x;
  PathStatus status = PathStatus::kFailed;
  int steps = 0;
  double residual = std::numeric_limits<double>::infinity();
  double rcond = 0.0;
  bool via_endgame = false;   // endpoint recovered from a stalled path, not tau = 1
  int cycle = 0;              // loop-closure winding count; 0 = unused, -1 = no closure
  double stall_tau = 1.0;     // tau where the step size bottomed out, if it did
  double endgame_move = 0.0;  // displacement of the endgame refinement, patch coords
};

struct CriticalPointSet {
  std::vector<PathResult> paths;
  std::vector<VecXc> finite_regular;  // deduplicated representatives, path order
  int num_paths = 0;
  int num_failed = 0;
  int num_at_infinity = 0;
  int num_near_singular = 0;
};

namespace detail {

// |p(x)| floor achievable by stable evaluation: sum of |coeff| * prod |x_v|^e.
inline double poly_eval_scale(const Polynomial& p, const VecXc& x) {
  double acc = 0.0;
  for (const auto& t : p.terms()) {
    double m = std::abs(t.coeff);
    for (int v = 0; v < p.nvars(); ++v)
      for (int e = 0; e < t.exp[static_cast<size_t>(v)]; ++e) m *= std::abs(x[v]);
    acc += m;
  }
  return std::max(acc, 1e-300);
}

// Flattened multi-polynomial evaluator for the tracking hot loop: one contiguous term
// array for the whole system, shared per-variable power tables built once per point,
// and no allocation per call.  Optionally accumulates the triangle-inequality scale
// sum_t |c_t| prod |x_v|^e of the leading polynomials in the same pass, which is what
// the corrector's backward-residual test needs.
struct FusedPolySet {
  static constexpr int kMaxDeg = 63;
  static constexpr int kVarCap = Polynomial::kMaxVars + 1;
  struct Term {
    Cplx coeff;
    double abscoeff;
    std::array<std::uint8_t, kVarCap> exp;
  };

  int nv = 0;
  std::vector<Term> terms;
  std::vector<int> offsets{0};
  std::array<int, kVarCap> vardeg{};

  void add(const Polynomial& p) {
    if (nv == 0) nv = p.nvars();
    if (p.nvars() != nv) throw Error(ErrorCode::kArityMismatch, "fused set arity mismatch");
    for (const auto& t : p.terms()) {
      Term ft{};
      ft.coeff = t.coeff;
      ft.abscoeff = std::abs(t.coeff);
      for (int v = 0; v < nv; ++v) {
        int e = t.exp[static_cast<size_t>(v)];
        if (e > kMaxDeg) throw Error(ErrorCode::kInvalidArgument, "degree beyond fused cap");
        ft.exp[static_cast<size_t>(v)] = static_cast<std::uint8_t>(e);
        vardeg[static_cast<size_t>(v)] = std::max(vardeg[static_cast<size_t>(v)], e);
      }
      terms.push_back(ft);
    }
    offsets.push_back(static_cast<int>(terms.size()));
  }

  int size() const { return static_cast<int>(offsets.size()) - 1; }

  // values[i] = p_i(x) for all polynomials; scales[i] for i < nscale when requested.
  void eval(const Cplx* x, Cplx* values, double* scales = nullptr, int nscale = 0) const {
    Cplx pw[kVarCap * (kMaxDeg + 1)];
    double apw[kVarCap * (kMaxDeg + 1)];
    for (int v = 0; v < nv; ++v) {
      Cplx* row = pw + v * (kMaxDeg + 1);
      row[0] = Cplx(1.0);
      for (int e = 1; e <= vardeg[static_cast<size_t>(v)]; ++e) row[e] = row[e - 1] * x[v];
      if (scales) {
        double* arow = apw + v * (kMaxDeg + 1);
        arow[0] = 1.0;
        const double ax = std::abs(x[v]);
        for (int e = 1; e <= vardeg[static_cast<size_t>(v)]; ++e) arow[e] = arow[e - 1] * ax;
      }
    }
    const int np = size();
    for (int i = 0; i < np; ++i) {
      const bool want_scale = scales != nullptr && i < nscale;
      Cplx acc(0.0);
      double sacc = 0.0;
      for (int j = offsets[static_cast<size_t>(i)]; j < offsets[static_cast<size_t>(i) + 1]; ++j) {
        const Term& t = terms[static_cast<size_t>(j)];
        Cplx m = t.coeff;
        for (int v = 0; v < nv; ++v) m *= pw[v * (kMaxDeg + 1) + t.exp[static_cast<size_t>(v)]];
        acc += m;
        if (want_scale) {
          double am = t.abscoeff;
          for (int v = 0; v < nv; ++v) am *= apw[v * (kMaxDeg + 1) + t.exp[static_cast<size_t>(v)]];
          sacc += am;
        }
      }
      values[i] = acc;
      if (want_scale) scales[i] = sacc;
    }
  }
};

inline Cplx ipow(Cplx b, int e) {
  Cplx r(1.0);
  for (; e > 0; --e) r *= b;
  return r;
}

inline double ipow(double b, int e) {
  double r = 1.0;
  for (; e > 0; --e) r *= b;
  return r;
}

// p with every term padded to degree deg by powers of a fresh variable 0; the affine
// variables shift up by one.
inline Polynomial homogenize(const Polynomial& p, int deg) {
  Polynomial r(p.nvars() + 1);
  for (const auto& t : p.terms()) {
    Polynomial::Exponents e{};
    int td = 0;
    for (int v = 0; v < p.nvars(); ++v) {
      e[static_cast<size_t>(v + 1)] = t.exp[static_cast<size_t>(v)];
      td += t.exp[static_cast<size_t>(v)];
    }
    e[0] = deg - td;
    r.add_term(t.coeff, e);
  }
  return r;
}

// Unconjugated product <a, b>; Eigen's dot() would conjugate.
inline Cplx dotu(const VecXc& a, const VecXc& b) {
  return (a.transpose() * b)(0);
}

// Paths are tracked on the projective closure: equations homogenized by variable 0,
// iterates pinned to a random affine patch <patch, x> = 1.  Solutions of any affine
// magnitude are ordinary patch points, so paths to them stay well-scaled; endpoints
// are dehomogenized before classification.
struct HomotopyWork {
  static constexpr int kBufCap = Polynomial::kMaxVars * (Polynomial::kMaxVars + 2);

  const CriticalSystem* sys;
  Cplx gamma;
  std::vector<int> degrees;
  std::vector<Polynomial> homog;      // n equations in n+1 variables
  std::vector<Polynomial> homog_jac;  // n x (n+1), row-major
  FusedPolySet fused;    // affine equations then jacobian, row-major
  FusedPolySet fused_h;  // homogenized equations then jacobian, row-major
  VecXc patch;           // length n+1

  int n() const { return sys->nvars; }

  void eval_target(const VecXc& x, VecXc& f, Eigen::MatrixXcd& J) const {
    Cplx buf[kBufCap];
    fused.eval(x.data(), buf);
    for (int i = 0; i < n(); ++i) {
      f[i] = buf[i];
      for (int k = 0; k < n(); ++k) J(i, k) = buf[n() + i * n() + k];
    }
  }

  // Also leaves the equations' triangle-inequality magnitudes in sf (length n) when
  // requested; backward_residual_h consumes them for the same point.
  void eval_target_h(const VecXc& x, VecXc& f, Eigen::MatrixXcd& J, double* sf = nullptr) const {
    Cplx buf[kBufCap];
    fused_h.eval(x.data(), buf, sf, sf != nullptr ? n() : 0);
    for (int i = 0; i < n(); ++i) {
      f[i] = buf[i];
      for (int k = 0; k <= n(); ++k) J(i, k) = buf[n() + i * (n() + 1) + k];
    }
  }

  // Homogenized start system x_{i+1}^{d_i} - x_0^{d_i}; restricted to x_0 = 1 it is
  // the usual roots-of-unity total-degree start.
  void eval_start_h(const VecXc& x, VecXc& g, Eigen::MatrixXcd& Jg) const {
    Jg.setZero();
    for (int i = 0; i < n(); ++i) {
      int d = degrees[static_cast<size_t>(i)];
      Cplx p0 = ipow(x[0], d - 1), pi = ipow(x[i + 1], d - 1);
      g[i] = x[i + 1] * pi - x[0] * p0;
      Jg(i, 0) = -static_cast<double>(d) * p0;
      Jg(i, i + 1) = static_cast<double>(d) * pi;
    }
  }

  // Backward residual of a homotopy value h at x: max_i |h_i| over the
  // triangle-inequality magnitude of the terms that produced it.  Once this hits
  // the rounding floor no Newton step can shrink |h| further, even though an
  // ill-conditioned Jacobian may still turn the noise into a large delta.  sf holds
  // the target equations' magnitudes from eval_target_h at the same point.
  double backward_residual_h(const VecXc& x, const VecXc& h, Cplx t, const double* sf) const {
    double worst = 0.0;
    for (int i = 0; i < n(); ++i) {
      int d = degrees[static_cast<size_t>(i)];
      double sg = ipow(std::abs(x[i + 1]), d) + ipow(std::abs(x[0]), d);
      double scale = std::abs(1.0 - t) * std::abs(gamma) * sg + std::abs(t) * sf[i];
      worst = std::max(worst, std::abs(h[i]) / std::max(scale, 1e-300));
    }
    return worst;
  }
};

// Corrector steps are accepted when the iterate is within rounding distance of the
// path, either by step size or by backward residual of the homotopy itself.
constexpr double kCorrectorFloor = 1e-13;

inline bool finite(const VecXc& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i].real()) || !std::isfinite(x[i].imag())) return false;
  return true;
}

// Newton refinement on the affine target system alone, then classification by
// backward residual and Jacobian conditioning.
inline PathResult finish_at_endpoint(const HomotopyWork& w, VecXc x, const TrackerConfig& cfg,
                                     int steps) {
  const int n = w.n();
  PathResult out;
  out.steps = steps;
  VecXc f(n);
  Eigen::MatrixXcd Jf(n, n);
  for (int it = 0; it < 20; ++it) {
    w.eval_target(x, f, Jf);
    VecXc delta = Jf.partialPivLu().solve(-f);
    if (!finite(delta)) break;
    double rel = delta.norm() / std::max(1.0, x.norm());
    x += delta;
    if (rel < 1e-14) break;
  }
  out.x = x;

  if (!finite(x) || x.cwiseAbs().maxCoeff() > cfg.infinity_threshold) {
    out.status = PathStatus::kAtInfinity;
    return out;
  }

  w.eval_target(x, f, Jf);
  double resid = 0.0;
  for (int i = 0; i < n; ++i)
    resid = std::max(resid,
                     std::abs(f[i]) / poly_eval_scale(w.sys->equations[static_cast<size_t>(i)], x));
  out.residual = resid;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Jf);
  double smax = svd.singularValues()(0);
  double smin = svd.singularValues()(n - 1);
  out.rcond = smax > 0 ? smin / smax : 0.0;

  if (resid > cfg.endpoint_residual_tol)
    out.status = PathStatus::kFailed;
  else if (out.rcond < cfg.singular_rcond)
    out.status = PathStatus::kNearSingular;
  else
    out.status = PathStatus::kFiniteRegular;
  return out;
}

inline PathResult track_one_path(const HomotopyWork& w, VecXc start_affine,
                                 const TrackerConfig& cfg) {
  const int n = w.n();
  PathResult out;
  double t = 0.0, dt = cfg.initial_step;
  int successes = 0;
  VecXc x(n + 1), f(n), g(n), h(n), dx(n + 1), xc(n + 1), rhs(n + 1);
  Eigen::MatrixXcd Jf(n, n + 1), Jg(n, n + 1), M(n + 1, n + 1);
  double sf[Polynomial::kMaxVars];

  x[0] = Cplx(1.0);
  x.tail(n) = start_affine;
  x /= dotu(w.patch, x);

  // Dehomogenize into affine coordinates; fails when the endpoint sits numerically on
  // the hyperplane at infinity.
  auto dehomogenize = [&](const VecXc& xe, VecXc& y) {
    double x0 = std::abs(xe[0]);
    if (!(x0 > 1e-14 * xe.cwiseAbs().maxCoeff())) return false;
    y = xe.tail(n) / xe[0];
    return finite(y);
  };

  // Bordered Newton on the homogenized target + patch row, then affine refinement
  // and classification of the dehomogenized point.  Used at tau = 1 and as the
  // endgame for paths that stall within rounding distance of it.
  auto finish_projective = [&](VecXc xe) {
    const VecXc xe0 = xe;
    for (int it = 0; it < 20; ++it) {
      w.eval_target_h(xe, f, Jf);
      M.topRows(n) = Jf;
      M.row(n) = w.patch.transpose();
      rhs.head(n) = -f;
      rhs[n] = Cplx(1.0) - dotu(w.patch, xe);
      VecXc delta = M.partialPivLu().solve(rhs);
      if (!finite(delta)) break;
      double rel = delta.norm() / std::max(1.0, xe.norm());
      xe += delta;
      if (rel < 1e-14) break;
    }
    out.endgame_move = (xe - xe0).norm();
    VecXc y;
    if (!dehomogenize(xe, y)) {
      out.x = xe;
      out.status = PathStatus::kAtInfinity;
      return out;
    }
    PathResult r = finish_at_endpoint(w, y, cfg, out.steps);
    r.endgame_move = out.endgame_move;
    r.cycle = out.cycle;
    return r;
  };

  // Newton corrector for a fixed, possibly complex tau on the circle.
  auto correct_on_circle = [&](Cplx tau, VecXc& xcc) {
    for (int it = 0; it < cfg.max_corrector_iters + 2; ++it) {
      w.eval_target_h(xcc, f, Jf, sf);
      w.eval_start_h(xcc, g, Jg);
      h = (1.0 - tau) * w.gamma * g + tau * f;
      if (w.backward_residual_h(xcc, h, tau, sf) <= kCorrectorFloor) return true;
      M.topRows(n) = (1.0 - tau) * w.gamma * Jg + tau * Jf;
      M.row(n) = w.patch.transpose();
      rhs.head(n) = -h;
      rhs[n] = Cplx(1.0) - dotu(w.patch, xcc);
      VecXc delta = M.partialPivLu().solve(rhs);
      if (!finite(delta)) return false;
      xcc += delta;
      if (delta.norm() <= cfg.newton_tol * std::max(1.0, xcc.norm())) return true;
    }
    return false;
  };

  // Cauchy endgame: continue a path stalled at tau0 around the circle
  // |1 - tau| = 1 - tau0 until it closes (after the local cycle count of loops),
  // then average the uniformly spaced samples.  For the fractional power series
  // x(tau) = sum_j a_j (1-tau)^(j/c) every fractional mode integrates to zero over
  // the closed loop, so the mean is x(1) itself -- no matter how slowly the path
  // converges in real tau.  Resolves endpoints inside singular clusters, where the
  // plain Newton endgame can fall into the basin of a neighboring root.
  auto cauchy_endgame = [&](const VecXc& x0, double tau0) -> std::optional<VecXc> {
    const double eps0 = 1.0 - tau0;
    if (!(eps0 > 0.0) || eps0 > 0.05) return std::nullopt;
    const int S = 16;  // quadrature nodes per loop
    const int max_winding = 12;
    const double seg = 2.0 * M_PI / S;
    VecXc xcur = x0, acc = VecXc::Zero(n + 1);
    const VecXc xloop = x0;
    long nodes = 0;
    for (int wind = 0; wind < max_winding; ++wind) {
      for (int k = 0; k < S; ++k) {
        acc += xcur;
        ++nodes;
        double th = seg * k, dth = seg;
        const double th_end = seg * (k + 1);
        while (th < th_end - 1e-15) {
          dth = std::min(dth, th_end - th);
          Cplx tau_a = 1.0 - eps0 * std::polar(1.0, th);
          Cplx tau_b = 1.0 - eps0 * std::polar(1.0, th + dth);
          w.eval_target_h(xcur, f, Jf);
          w.eval_start_h(xcur, g, Jg);
          M.topRows(n) = (1.0 - tau_a) * w.gamma * Jg + tau_a * Jf;
          M.row(n) = w.patch.transpose();
          rhs.head(n) = (w.gamma * g - f) * (tau_b - tau_a);
          rhs[n] = Cplx(0.0);
          dx = M.partialPivLu().solve(rhs);
          VecXc xt = xcur + dx;
          if (finite(xt) && correct_on_circle(tau_b, xt)) {
            Cplx px = dotu(w.patch, xt);
            if (std::abs(px) < 1e-14) return std::nullopt;
            xcur = xt / px;
            th += dth;
            dth = std::min(dth * 2.0, seg);
          } else {
            dth *= 0.5;
            if (dth < seg / 256.0) return std::nullopt;
          }
        }
      }
      if ((xcur - xloop).norm() <= 1e-5 * (1.0 + xloop.norm())) {
        out.cycle = wind + 1;
        return VecXc(acc / static_cast<double>(nodes));
      }
    }
    out.cycle = -1;
    return std::nullopt;
  };

  // Endgame for paths whose step size bottoms out.  Very close to tau = 1 the
  // corrector's fixed tolerance can sit below the attainable rounding floor even
  // though the iterate is already at its endpoint, so run the Cauchy endgame, or
  // failing that give the plain endpoint refinement a chance before giving up.
  auto classify_dead_path = [&](const VecXc& xe, double te) {
    out.via_endgame = true;
    out.stall_tau = te;
    if (te > 0.995 && te < 1.0 && finite(xe)) {
      if (std::optional<VecXc> est = cauchy_endgame(xe, te)) {
        PathResult r = finish_projective(*est);
        r.via_endgame = true;
        r.stall_tau = te;
        if (r.status != PathStatus::kFailed) return r;
      }
    }
    if (te > 0.999 && finite(xe)) {
      PathResult r = finish_projective(xe);
      r.via_endgame = true;
      r.stall_tau = te;
      if (r.status != PathStatus::kFailed) return r;
    }
    VecXc y;
    if (dehomogenize(xe, y)) {
      out.x = y;
      out.status = (te > 0.99 && y.cwiseAbs().maxCoeff() > 1e-3 * cfg.infinity_threshold)
                       ? PathStatus::kAtInfinity
                       : PathStatus::kFailed;
    } else {
      out.x = xe;
      out.status = te > 0.99 ? PathStatus::kAtInfinity : PathStatus::kFailed;
    }
    return out;
  };

  while (out.steps < cfg.max_steps_per_path) {
    if (t >= 1.0) break;
    if (dt < cfg.min_step) return classify_dead_path(x, t);
    ++out.steps;

    // Euler predictor along the patch: [Hx; patch] dx = [gamma g - f; 0]
    w.eval_target_h(x, f, Jf);
    w.eval_start_h(x, g, Jg);
    M.topRows(n) = (1.0 - t) * w.gamma * Jg + t * Jf;
    M.row(n) = w.patch.transpose();
    rhs.head(n) = w.gamma * g - f;
    rhs[n] = Cplx(0.0);
    dx = M.partialPivLu().solve(rhs);

    double step = std::min(dt, 1.0 - t);
    double tn = t + step;
    xc = x + dx * step;

    // Newton corrector at tn
    bool converged = false;
    if (finite(xc)) {
      for (int it = 0; it < cfg.max_corrector_iters; ++it) {
        w.eval_target_h(xc, f, Jf, sf);
        w.eval_start_h(xc, g, Jg);
        h = (1.0 - tn) * w.gamma * g + tn * f;
        if (w.backward_residual_h(xc, h, tn, sf) <= kCorrectorFloor) {
          converged = true;
          break;
        }
        M.topRows(n) = (1.0 - tn) * w.gamma * Jg + tn * Jf;
        M.row(n) = w.patch.transpose();
        rhs.head(n) = -h;
        rhs[n] = Cplx(1.0) - dotu(w.patch, xc);
        VecXc delta = M.partialPivLu().solve(rhs);
        if (!finite(delta)) break;
        xc += delta;
        if (delta.norm() <= cfg.newton_tol * std::max(1.0, xc.norm())) {
          converged = true;
          break;
        }
      }
    }

    if (converged) {
      Cplx px = dotu(w.patch, xc);
      if (std::abs(px) < 1e-14) return classify_dead_path(x, t);  // patch degenerate here
      x = xc / px;
      t = tn;
      if (++successes >= cfg.successes_before_growth) {
        dt = std::min(dt * 2.0, cfg.initial_step);
        successes = 0;
      }
    } else {
      successes = 0;
      dt *= 0.5;
    }
  }

  if (t < 1.0) return classify_dead_path(x, t);  // step budget exhausted

  return finish_projective(x);
}

}  // namespace detail

// Total-degree homotopy continuation: start system x_i^{d_i} - 1 with a random complex
// gamma, Euler predictor + Newton corrector, adaptive step halving/doubling, and
// endpoint classification.  Tracking runs on the projective closure over a random
// affine patch.  Paths are independent; with threads > 1 they are tracked
// concurrently and merged in path order, so results do not depend on the thread count.
inline CriticalPointSet track_paths(const CriticalSystem& sys, const TrackerConfig& cfg) {
  const int n = sys.nvars;
  detail::HomotopyWork w;
  w.sys = &sys;
  Rng gamma_rng = Rng::derive(cfg.seed, 0x67616d6d61ull);
  double theta = gamma_rng.uniform(0.0, 2.0 * M_PI);
  w.gamma = Cplx(std::cos(theta), std::sin(theta));

  long total = 1;
  for (int i = 0; i < n; ++i) {
    const Polynomial& eq = sys.equations[static_cast<size_t>(i)];
    int d = eq.total_degree();
    if (d < 1) throw Error(ErrorCode::kZeroPolynomial, "system equation has no degree");
    w.degrees.push_back(d);
    total *= d;
    w.homog.push_back(detail::homogenize(eq, d));
    for (int k = 0; k <= n; ++k)
      w.homog_jac.push_back(w.homog.back().derivative(k));
  }
  for (const auto& p : sys.equations) w.fused.add(p);
  for (const auto& p : sys.jacobian) w.fused.add(p);
  for (const auto& p : w.homog) w.fused_h.add(p);
  for (const auto& p : w.homog_jac) w.fused_h.add(p);

  Rng patch_rng = Rng::derive(cfg.seed, 0x7061746368ull);
  w.patch = VecXc(n + 1);
  for (int k = 0; k <= n; ++k) w.patch[k] = Cplx(patch_rng.normal(), patch_rng.normal());
  w.patch /= w.patch.norm();

  std::vector<VecXc> starts;
  starts.reserve(static_cast<size_t>(total));
  std::vector<int> idx(static_cast<size_t>(n), 0);
  for (long p = 0; p < total; ++p) {
    VecXc x(n);
    for (int i = 0; i < n; ++i) {
      double ang = 2.0 * M_PI * idx[static_cast<size_t>(i)] / w.degrees[static_cast<size_t>(i)];
      x[i] = Cplx(std::cos(ang), std::sin(ang));
    }
    starts.push_back(std::move(x));
    for (int i = 0; i < n; ++i) {
      if (++idx[static_cast<size_t>(i)] < w.degrees[static_cast<size_t>(i)]) break;
      idx[static_cast<size_t>(i)] = 0;
    }
  }

  CriticalPointSet out;
  out.num_paths = static_cast<int>(starts.size());
  out.paths.resize(starts.size());

  int threads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(starts.size())));
  if (threads == 1) {
    for (size_t i = 0; i < starts.size(); ++i)
      out.paths[i] = detail::track_one_path(w, starts[i], cfg);
  } else {
    std::atomic<size_t> next{0};
    auto worker = [&]() {
      while (true) {
        size_t i = next.fetch_add(1);
        if (i >= starts.size()) return;
        out.paths[i] = detail::track_one_path(w, starts[i], cfg);
      }
    };
    std::vector<std::thread> pool;
    for (int tix = 0; tix < threads; ++tix) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (const auto& p : out.paths) {
    switch (p.status) {
      case PathStatus::kFailed: ++out.num_failed; break;
      case PathStatus::kAtInfinity: ++out.num_at_infinity; break;
      case PathStatus::kNearSingular: ++out.num_near_singular; break;
      case PathStatus::kFiniteRegular: {
        bool dup = false;
        for (const auto& r : out.finite_regular)
          if ((r - p.x).cwiseAbs().maxCoeff() <=
              cfg.dedup_tol * std::max(1.0, r.cwiseAbs().maxCoeff())) {
            dup = true;
            break;
          }
        if (!dup) out.finite_regular.push_back(p.x);
        break;
      }
    }
  }
  return out;
}

}  // namespace linetri
