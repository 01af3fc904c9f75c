#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <complex>
#include <vector>

#include "projective.hpp"

namespace linetri {

using Cplx = std::complex<double>;
using VecXc = Eigen::VectorXcd;

// Sparse polynomial over C in up to kMaxVars variables.  Terms are kept in graded
// lexicographic order with merged exponents, so arithmetic results are canonical and
// evaluation order is deterministic.
class Polynomial {
 public:
  static constexpr int kMaxVars = 4;
  using Exponents = std::array<int, kMaxVars>;
  struct Term {
    Cplx coeff;
    Exponents exp;
  };

  explicit Polynomial(int nvars = 1) : nvars_(nvars) {
    if (nvars < 1 || nvars > kMaxVars)
      throw Error(ErrorCode::kInvalidArgument, "unsupported variable count");
  }

  static Polynomial constant(int nvars, Cplx c) {
    Polynomial p(nvars);
    p.add_term(c, Exponents{});
    return p;
  }

  static Polynomial variable(int nvars, int k) {
    Polynomial p(nvars);
    Exponents e{};
    e[static_cast<size_t>(k)] = 1;
    p.add_term(Cplx(1.0), e);
    return p;
  }

  // c0 + sum_k c[k] x_k
  static Polynomial affine_form(int nvars, const VecXc& c, Cplx c0) {
    Polynomial p(nvars);
    p.add_term(c0, Exponents{});
    for (int k = 0; k < nvars; ++k) {
      Exponents e{};
      e[static_cast<size_t>(k)] = 1;
      p.add_term(c[k], e);
    }
    return p;
  }

  int nvars() const { return nvars_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  int total_degree() const {
    int d = -1;
    for (const auto& t : terms_) d = std::max(d, degree_of(t.exp));
    return d;
  }

  void add_term(Cplx c, const Exponents& e) {
    terms_.push_back({c, e});
    canonicalize();
  }

  Polynomial operator-() const {
    Polynomial r = *this;
    for (auto& t : r.terms_) t.coeff = -t.coeff;
    return r;
  }

  Polynomial operator+(const Polynomial& o) const {
    check_arity(o);
    Polynomial r(nvars_);
    r.terms_ = terms_;
    r.terms_.insert(r.terms_.end(), o.terms_.begin(), o.terms_.end());
    r.canonicalize();
    return r;
  }

  Polynomial operator-(const Polynomial& o) const { return *this + (-o); }

  Polynomial operator*(const Polynomial& o) const {
    check_arity(o);
    Polynomial r(nvars_);
    r.terms_.reserve(terms_.size() * o.terms_.size());
    for (const auto& a : terms_)
      for (const auto& b : o.terms_) {
        Exponents e;
        for (int k = 0; k < kMaxVars; ++k) e[static_cast<size_t>(k)] = a.exp[static_cast<size_t>(k)] + b.exp[static_cast<size_t>(k)];
        r.terms_.push_back({a.coeff * b.coeff, e});
      }
    r.canonicalize();
    return r;
  }

  Polynomial operator*(Cplx s) const {
    Polynomial r = *this;
    for (auto& t : r.terms_) t.coeff *= s;
    r.canonicalize();
    return r;
  }

  Polynomial pow(int k) const {
    if (k < 0) throw Error(ErrorCode::kInvalidArgument, "negative power");
    Polynomial r = constant(nvars_, 1.0);
    for (int i = 0; i < k; ++i) r = r * (*this);
    return r;
  }

  Polynomial derivative(int var) const {
    Polynomial r(nvars_);
    for (const auto& t : terms_) {
      int e = t.exp[static_cast<size_t>(var)];
      if (e == 0) continue;
      Exponents d = t.exp;
      d[static_cast<size_t>(var)] = e - 1;
      r.terms_.push_back({t.coeff * static_cast<double>(e), d});
    }
    r.canonicalize();
    return r;
  }

  Cplx eval(const VecXc& x) const { return eval(x.data()); }

  Cplx eval(const Cplx* x) const {
    // power table per variable; per-variable degrees are small in this library
    std::array<std::vector<Cplx>, kMaxVars> pows;
    for (int v = 0; v < nvars_; ++v) {
      int d = 0;
      for (const auto& t : terms_) d = std::max(d, t.exp[static_cast<size_t>(v)]);
      auto& tab = pows[static_cast<size_t>(v)];
      tab.resize(static_cast<size_t>(d) + 1);
      tab[0] = Cplx(1.0);
      for (int e = 1; e <= d; ++e) tab[static_cast<size_t>(e)] = tab[static_cast<size_t>(e - 1)] * x[v];
    }
    Cplx acc(0.0);
    for (const auto& t : terms_) {
      Cplx m = t.coeff;
      for (int v = 0; v < nvars_; ++v) m *= pows[static_cast<size_t>(v)][static_cast<size_t>(t.exp[static_cast<size_t>(v)])];
      acc += m;
    }
    return acc;
  }

  double max_coeff_norm() const {
    double m = 0.0;
    for (const auto& t : terms_) m = std::max(m, std::abs(t.coeff));
    return m;
  }

  // Drop terms below rel_eps times the largest coefficient magnitude.  Explicit only;
  // arithmetic never trims on its own.
  void trim(double rel_eps) {
    double m = max_coeff_norm();
    if (m == 0.0) return;
    std::erase_if(terms_, [&](const Term& t) { return std::abs(t.coeff) <= rel_eps * m; });
  }

  void scale_to_unit_max() {
    double m = max_coeff_norm();
    if (m == 0.0) throw Error(ErrorCode::kZeroPolynomial, "cannot scale the zero polynomial");
    for (auto& t : terms_) t.coeff /= m;
  }

  // Dense coefficient vector c[k] of t^k for univariate polynomials.
  VecXc univariate_coeffs() const {
    if (nvars_ != 1) throw Error(ErrorCode::kInvalidArgument, "not univariate");
    int d = std::max(total_degree(), 0);
    VecXc c = VecXc::Zero(d + 1);
    for (const auto& t : terms_) c[t.exp[0]] += t.coeff;
    return c;
  }

 private:
  static int degree_of(const Exponents& e) {
    int s = 0;
    for (int v : e) s += v;
    return s;
  }

  static bool exp_less(const Exponents& a, const Exponents& b) {
    int da = degree_of(a), db = degree_of(b);
    if (da != db) return da < db;
    return a < b;
  }

  void check_arity(const Polynomial& o) const {
    if (o.nvars_ != nvars_)
      throw Error(ErrorCode::kArityMismatch, "polynomial variable counts differ");
  }

  void canonicalize() {
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& a, const Term& b) { return exp_less(a.exp, b.exp); });
    std::vector<Term> merged;
    merged.reserve(terms_.size());
    for (const auto& t : terms_) {
      if (!merged.empty() && merged.back().exp == t.exp)
        merged.back().coeff += t.coeff;
      else
        merged.push_back(t);
    }
    std::erase_if(merged, [](const Term& t) { return t.coeff == Cplx(0.0); });
    terms_ = std::move(merged);
  }

  int nvars_;
  std::vector<Term> terms_;
};

inline Polynomial operator*(Cplx s, const Polynomial& p) { return p * s; }

inline Cplx eval_poly_coeffs(const VecXc& c, Cplx t) {
  Cplx acc(0.0);
  for (Eigen::Index k = c.size() - 1; k >= 0; --k) acc = acc * t + c[k];
  return acc;
}

inline Cplx eval_poly_coeffs_deriv(const VecXc& c, Cplx t) {
  Cplx acc(0.0);
  for (Eigen::Index k = c.size() - 1; k >= 1; --k) acc = acc * t + c[k] * static_cast<double>(k);
  return acc;
}

namespace detail {

// Parlett–Reinsch balancing: similarity scaling by powers of two so row and column
// norms match; improves companion eigenvalue accuracy without changing the spectrum.
inline void balance_matrix(Eigen::MatrixXcd& a) {
  const double radix = 2.0;
  const double radix2 = radix * radix;
  const Eigen::Index n = a.rows();
  bool done = false;
  int sweeps = 0;
  while (!done && sweeps++ < 100) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix, f = 1.0, s = c + r;
      while (c < g) {
        f *= radix;
        c *= radix2;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix2;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

}  // namespace detail

struct UnivariateRoots {
  VecXc roots;
  // Backward-error residual at the worst root: |p(t)| / sum_k |c_k||t|^k with the
  // coefficients scaled to unit max-norm.  This is the quantity a stable evaluation
  // can actually drive to rounding level regardless of root magnitude.
  double max_residual = 0.0;
};

inline double backward_residual(const VecXc& c, Cplx t) {
  double scale = 0.0, p = 1.0, at = std::abs(t);
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    scale += std::abs(c[k]) * p;
    p *= at;
  }
  return std::abs(eval_poly_coeffs(c, t)) / std::max(scale, 1e-300);
}

// All complex roots via balanced companion-matrix eigenvalues, each polished by a few
// Newton steps.  Leading coefficients below 1e-14 of the max-norm are discarded first.
inline UnivariateRoots solve_univariate(const VecXc& coeffs_in) {
  double maxc = 0.0;
  for (Eigen::Index i = 0; i < coeffs_in.size(); ++i) maxc = std::max(maxc, std::abs(coeffs_in[i]));
  if (!(maxc > 0.0)) throw Error(ErrorCode::kZeroPolynomial, "zero polynomial has no root set");
  VecXc c = coeffs_in / maxc;

  Eigen::Index deg = c.size() - 1;
  while (deg > 0 && std::abs(c[deg]) <= 1e-14) --deg;
  c.conservativeResize(deg + 1);
  if (deg == 0) return {VecXc(0), 0.0};

  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
  for (Eigen::Index i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < deg; ++i) comp(i, deg - 1) = -c[i] / c[deg];
  detail::balance_matrix(comp);

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  if (es.info() != Eigen::Success)
    throw Error(ErrorCode::kSolverFailure, "companion eigenvalue iteration failed");

  UnivariateRoots out;
  out.roots = es.eigenvalues();
  for (Eigen::Index i = 0; i < out.roots.size(); ++i) {
    Cplx t = out.roots[i];
    Cplx best_t = t;
    double best_r = backward_residual(c, t);
    for (int it = 0; it < 10 && best_r > 1e-16; ++it) {
      Cplx dp = eval_poly_coeffs_deriv(c, t);
      if (std::abs(dp) < 1e-300) break;
      t -= eval_poly_coeffs(c, t) / dp;
      double r = backward_residual(c, t);
      if (r < best_r) {
        best_r = r;
        best_t = t;
      }
    }
    out.roots[i] = best_t;
    out.max_residual = std::max(out.max_residual, best_r);
  }
  return out;
}

inline UnivariateRoots solve_univariate(const Polynomial& p) {
  return solve_univariate(p.univariate_coeffs());
}

}  // namespace linetri
