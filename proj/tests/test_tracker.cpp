#include <linetri/tracker.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <complex>
#include <vector>

using namespace linetri;

namespace {

Polynomial from_terms(int nvars, std::vector<std::pair<Cplx, Polynomial::Exponents>> terms) {
  Polynomial p(nvars);
  for (auto& [c, e] : terms) p.add_term(c, e);
  return p;
}

CriticalSystem make_system(std::vector<Polynomial> eqs) {
  CriticalSystem sys;
  sys.nvars = eqs[0].nvars();
  sys.equations = std::move(eqs);
  for (auto& e : sys.equations) e.scale_to_unit_max();
  const int n = sys.nvars;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      sys.jacobian.push_back(sys.equations[static_cast<size_t>(i)].derivative(k));
  return sys;
}

bool contains_root(const std::vector<VecXc>& roots, std::initializer_list<Cplx> want,
                   double tol = 1e-8) {
  for (const auto& r : roots) {
    double d = 0.0;
    int i = 0;
    for (Cplx w : want) d = std::max(d, std::abs(r[i++] - w));
    if (d < tol) return true;
  }
  return false;
}

}  // namespace

TEST(Tracker, UnivariateCubicMatchesCompanionSolver) {
  // (x - 1)(x - 2)(x + 0.5)
  Polynomial p = from_terms(1, {{Cplx(1), {3}}, {Cplx(-2.5), {2}}, {Cplx(0.5), {1}}, {Cplx(1), {0}}});
  CriticalSystem sys = make_system({p});
  TrackerConfig cfg;
  cfg.seed = 7;
  CriticalPointSet set = track_paths(sys, cfg);
  EXPECT_EQ(set.num_paths, 3);
  ASSERT_EQ(set.finite_regular.size(), 3u);
  EXPECT_TRUE(contains_root(set.finite_regular, {Cplx(1.0)}));
  EXPECT_TRUE(contains_root(set.finite_regular, {Cplx(2.0)}));
  EXPECT_TRUE(contains_root(set.finite_regular, {Cplx(-0.5)}));

  UnivariateRoots comp = solve_univariate(p);
  for (Eigen::Index i = 0; i < comp.roots.size(); ++i) {
    VecXc r(1);
    r[0] = comp.roots[i];
    EXPECT_TRUE(contains_root(set.finite_regular, {comp.roots[i]}));
    (void)r;
  }
}

TEST(Tracker, TwoVariableSystemFindsAllFourSolutions) {
  // x^2 + y^2 = 5, x y = 2  ->  (1,2), (2,1), (-1,-2), (-2,-1)
  Polynomial f1 = from_terms(2, {{Cplx(1), {2, 0}}, {Cplx(1), {0, 2}}, {Cplx(-5), {0, 0}}});
  Polynomial f2 = from_terms(2, {{Cplx(1), {1, 1}}, {Cplx(-2), {0, 0}}});
  CriticalSystem sys = make_system({f1, f2});
  TrackerConfig cfg;
  cfg.seed = 11;
  CriticalPointSet set = track_paths(sys, cfg);
  EXPECT_EQ(set.num_paths, 4);
  ASSERT_EQ(set.finite_regular.size(), 4u);
  EXPECT_TRUE(contains_root(set.finite_regular, {Cplx(1), Cplx(2)}));
  EXPECT_TRUE(contains_root(set.finite_regular, {Cplx(2), Cplx(1)}));
  EXPECT_TRUE(contains_root(set.finite_regular, {Cplx(-1), Cplx(-2)}));
  EXPECT_TRUE(contains_root(set.finite_regular, {Cplx(-2), Cplx(-1)}));
  EXPECT_EQ(set.num_failed, 0);
}

TEST(Tracker, DivergentPathsClassifiedAtInfinity) {
  // x^2 = 1, x y = 1: Bezout 4, two finite solutions, two paths leave to infinity
  Polynomial f1 = from_terms(2, {{Cplx(1), {2, 0}}, {Cplx(-1), {0, 0}}});
  Polynomial f2 = from_terms(2, {{Cplx(1), {1, 1}}, {Cplx(-1), {0, 0}}});
  CriticalSystem sys = make_system({f1, f2});
  TrackerConfig cfg;
  cfg.seed = 3;
  CriticalPointSet set = track_paths(sys, cfg);
  EXPECT_EQ(set.num_paths, 4);
  EXPECT_EQ(set.finite_regular.size(), 2u);
  EXPECT_TRUE(contains_root(set.finite_regular, {Cplx(1), Cplx(1)}));
  EXPECT_TRUE(contains_root(set.finite_regular, {Cplx(-1), Cplx(-1)}));
  EXPECT_EQ(set.num_at_infinity + set.num_failed, 2);
  EXPECT_GE(set.num_at_infinity, 1);
}

TEST(Tracker, MultipleRootClassifiedNearSingular) {
  // (x - 1)^2 = 0, y = 1: double root, singular Jacobian at the endpoint
  Polynomial f1 = from_terms(2, {{Cplx(1), {2, 0}}, {Cplx(-2), {1, 0}}, {Cplx(1), {0, 0}}});
  Polynomial f2 = from_terms(2, {{Cplx(1), {0, 1}}, {Cplx(-1), {0, 0}}});
  CriticalSystem sys = make_system({f1, f2});
  TrackerConfig cfg;
  cfg.seed = 5;
  CriticalPointSet set = track_paths(sys, cfg);
  EXPECT_EQ(set.num_paths, 2);
  EXPECT_EQ(set.finite_regular.size(), 0u);
  EXPECT_EQ(set.num_near_singular + set.num_failed, 2);
  EXPECT_GE(set.num_near_singular, 1);
}

TEST(Tracker, SameSeedIsBitwiseReproducible) {
  Polynomial f1 = from_terms(2, {{Cplx(1), {2, 0}}, {Cplx(1), {0, 2}}, {Cplx(-5), {0, 0}}});
  Polynomial f2 = from_terms(2, {{Cplx(1), {1, 1}}, {Cplx(-2), {0, 0}}});
  CriticalSystem sys = make_system({f1, f2});
  TrackerConfig cfg;
  cfg.seed = 42;
  CriticalPointSet a = track_paths(sys, cfg);
  CriticalPointSet b = track_paths(sys, cfg);
  ASSERT_EQ(a.finite_regular.size(), b.finite_regular.size());
  for (size_t i = 0; i < a.finite_regular.size(); ++i)
    EXPECT_EQ(a.finite_regular[i], b.finite_regular[i]);
}

TEST(Tracker, ThreadCountDoesNotChangeResults) {
  Polynomial f1 = from_terms(2, {{Cplx(1), {2, 0}}, {Cplx(1), {0, 2}}, {Cplx(-5), {0, 0}}});
  Polynomial f2 = from_terms(2, {{Cplx(1), {1, 1}}, {Cplx(-2), {0, 0}}});
  CriticalSystem sys = make_system({f1, f2});
  TrackerConfig cfg;
  cfg.seed = 13;
  cfg.threads = 1;
  CriticalPointSet a = track_paths(sys, cfg);
  cfg.threads = 4;
  CriticalPointSet b = track_paths(sys, cfg);
  ASSERT_EQ(a.finite_regular.size(), b.finite_regular.size());
  for (size_t i = 0; i < a.finite_regular.size(); ++i)
    EXPECT_EQ(a.finite_regular[i], b.finite_regular[i]);
}

TEST(Tracker, DifferentGammaSeedsAgreeOnSolutionCount) {
  Polynomial f1 = from_terms(2, {{Cplx(1), {2, 0}}, {Cplx(1), {0, 2}}, {Cplx(-5), {0, 0}}});
  Polynomial f2 = from_terms(2, {{Cplx(1), {1, 1}}, {Cplx(-2), {0, 0}}});
  CriticalSystem sys = make_system({f1, f2});
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    TrackerConfig cfg;
    cfg.seed = seed;
    EXPECT_EQ(track_paths(sys, cfg).finite_regular.size(), 4u) << "seed " << seed;
  }
}

TEST(Tracker, ZeroDegreeEquationRejected) {
  Polynomial c = Polynomial::constant(1, Cplx(1.0));
  CriticalSystem sys;
  sys.nvars = 1;
  sys.equations = {c};
  sys.jacobian = {c.derivative(0)};
  try {
    track_paths(sys, TrackerConfig{});
    FAIL() << "expected throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroPolynomial);
  }
}
