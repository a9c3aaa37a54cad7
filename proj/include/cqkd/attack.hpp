#pragma once

// Eve's two-angle coherent attack on Bob's qubit. Eve holds a qubit ancilla
// prepared in |0>_E; the attack is stored as the isometry
//   |b>_B |0>_E  ->  sum_b' |b'>_B |Phi_{b b'}>_E
// from B into B (x) E. Completing it to a full unitary on B (x) E is a gauge
// choice that no reduced state depends on.

#include <array>

#include <Eigen/Dense>

#include "cqkd/qstate.hpp"

namespace cqkd {

struct AttackParams {
  double theta = 0.0;
  double phi = 0.0;

  bool operator==(const AttackParams&) const = default;
};

// gamma_mn = (-1)^{mn} cos(theta - m pi/2) cos(phi - n pi/2), m, n in {0, 1}.
double gamma(int m, int n, const AttackParams& p);

class EveIsometry {
 public:
  using EveKet = std::array<Complex, 2>;  // coefficients on |0>_E, |1>_E

  explicit EveIsometry(const AttackParams& p);

  [[nodiscard]] const AttackParams& params() const { return params_; }

  // Phi_{b, b_out}: Eve's (unnormalized) ket attached to Bob ending in |b_out>
  // when he started in |b>.
  [[nodiscard]] const EveKet& phi_state(int b, int b_out) const { return phi_[2 * b + b_out]; }

  // 4x2 matrix of the isometry, rows indexed by (b_out, e), columns by b.
  [[nodiscard]] const Eigen::Matrix<Complex, 4, 2>& matrix() const { return v_; }

  // <Phi00|Phi10> + <Phi01|Phi11>; zero for a valid isometry.
  [[nodiscard]] Complex orthogonality_defect() const;
  // |Phi00|^2 + |Phi01|^2 and |Phi10|^2 + |Phi11|^2; both one.
  [[nodiscard]] std::array<double, 2> column_norms() const;

 private:
  AttackParams params_;
  std::array<EveKet, 4> phi_;
  Eigen::Matrix<Complex, 4, 2> v_;
};

EveIsometry build_isometry(const AttackParams& p);

// Eve's ancilla in |0>_E next to the singlet on A, B: labels [A, B, E].
DensityMatrix initial_state();

// Applies identity_A (x) U_BE to a state on [A, B, E] whose E marginal is
// |0><0|. Other E preparations throw PreconditionError: the attack is only
// defined on that slice.
DensityMatrix apply_attack(const DensityMatrix& initial, const EveIsometry& iso);

// Bob's channel induced by the attack: rho_B -> Tr_E V rho_B V^dagger.
Eigen::Matrix2cd bob_channel(const EveIsometry& iso, const Eigen::Matrix2cd& rho_b);

struct BipartiteReductions {
  DensityMatrix ab;
  DensityMatrix ae;
  DensityMatrix be;
};

BipartiteReductions bipartite_reductions(const DensityMatrix& rho_abe);

// initial_state() -> apply_attack -> bipartite_reductions in one call.
BipartiteReductions attacked_reductions(const AttackParams& p);

}  // namespace cqkd
