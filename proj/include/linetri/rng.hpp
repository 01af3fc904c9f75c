#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cmath>
#include <cstdint>
#include <random>

namespace linetri {

// Deterministic random streams.  Every work item (scene, observation pass, solver
// gamma, slice trial) derives its own generator from (master seed, stream tag, index),
// so results are bitwise reproducible regardless of evaluation order or thread count.
// Normal draws use an explicit Box-Muller transform instead of std::normal_distribution
// because the latter's output sequence is not pinned by the standard.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  static std::uint64_t mix(std::uint64_t h, std::uint64_t k) {
    h ^= k + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h *= 0xbf58476d1ce4e5b9ull;
    h ^= h >> 31;
    return h;
  }

  static Rng derive(std::uint64_t master, std::uint64_t stream, std::uint64_t index = 0) {
    return Rng(mix(mix(mix(master, 0xd1b54a32d192ed03ull), stream), index));
  }

  std::uint64_t raw() { return gen_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  std::complex<double> normal_complex() {
    double re = normal();
    double im = normal();
    return {M_SQRT1_2 * re, M_SQRT1_2 * im};
  }

  template <int N>
  Eigen::Matrix<double, N, 1> normal_vec() {
    Eigen::Matrix<double, N, 1> v;
    for (int i = 0; i < N; ++i) v[i] = normal();
    return v;
  }

  Eigen::VectorXd normal_vec(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  // Uniform direction on the unit sphere of R^N.
  template <int N>
  Eigen::Matrix<double, N, 1> unit_vec() {
    while (true) {
      Eigen::Matrix<double, N, 1> v = normal_vec<N>();
      double n = v.norm();
      if (n > 1e-8) return v / n;
    }
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace linetri
