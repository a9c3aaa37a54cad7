#pragma once

// Generators for property tests. Each test seeds its own engine so failures
// reproduce from the printed seed.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "cqkd/attack.hpp"
#include "cqkd/protosim.hpp"
#include "cqkd/qstate.hpp"

namespace cqkd::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

  BlochDirection direction() { return BlochDirection::from_cos(uniform(-1.0, 1.0), uniform(0.0, kTwoPi)); }
  SampledDirection sampled() { return {uniform(-1.0, 1.0), uniform(0.0, kTwoPi)}; }

  AttackParams attack() { return {uniform(0.0, kTwoPi), uniform(0.0, kTwoPi)}; }

  // G G^dagger / Tr for a complex Gaussian G: full-rank mixed state.
  DensityMatrix mixed_state(std::size_t qubits_count, Labels labels) {
    const Eigen::Index n = Eigen::Index{1} << qubits_count;
    Matrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) g(i, j) = Complex(normal(), normal());
    }
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return DensityMatrix(rho, std::move(labels));
  }

  Eigen::VectorXcd ket(std::size_t qubits_count) {
    const Eigen::Index n = Eigen::Index{1} << qubits_count;
    Eigen::VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(normal(), normal());
    return v / v.norm();
  }

 private:
  std::mt19937_64 engine_;
};

inline Eigen::Matrix2cd plus_projector() {
  Eigen::Matrix2cd m;
  m << 0.5, 0.5, 0.5, 0.5;
  return m;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace cqkd::testing
