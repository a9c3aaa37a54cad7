#include "cqkd/attack.hpp"

#include <cmath>
#include <string>

#include "cqkd/error.hpp"

namespace cqkd {

double gamma(int m, int n, const AttackParams& p) {
  if ((m != 0 && m != 1) || (n != 0 && n != 1)) {
    throw PreconditionError("gamma: indices must be bits");
  }
  const double sign = (m * n == 1) ? -1.0 : 1.0;
  // cos(x - pi/2) is evaluated as sin(x) so that gamma vanishes exactly at
  // the canonical zeros instead of at ~6e-17.
  const double a = m == 0 ? std::cos(p.theta) : std::sin(p.theta);
  const double b = n == 0 ? std::cos(p.phi) : std::sin(p.phi);
  return sign * a * b;
}

EveIsometry::EveIsometry(const AttackParams& p) : params_(p) {
  const double g00 = gamma(0, 0, p);
  const double g01 = gamma(0, 1, p);
  const double g10 = gamma(1, 0, p);
  const double g11 = gamma(1, 1, p);
  // Rows of the coefficient matrix in |0>_E, |1>_E.
  phi_[0] = {g00, g01};  // Phi00
  phi_[1] = {g10, g11};  // Phi01
  phi_[2] = {g11, g10};  // Phi10
  phi_[3] = {g01, g00};  // Phi11

  for (int b = 0; b < 2; ++b) {
    for (int b_out = 0; b_out < 2; ++b_out) {
      for (int e = 0; e < 2; ++e) v_(2 * b_out + e, b) = phi_state(b, b_out)[e];
    }
  }
}

Complex EveIsometry::orthogonality_defect() const {
  auto dot = [](const EveKet& x, const EveKet& y) {
    return std::conj(x[0]) * y[0] + std::conj(x[1]) * y[1];
  };
  return dot(phi_state(0, 0), phi_state(1, 0)) + dot(phi_state(0, 1), phi_state(1, 1));
}

std::array<double, 2> EveIsometry::column_norms() const {
  auto n2 = [](const EveKet& x) { return std::norm(x[0]) + std::norm(x[1]); };
  return {n2(phi_state(0, 0)) + n2(phi_state(0, 1)), n2(phi_state(1, 0)) + n2(phi_state(1, 1))};
}

EveIsometry build_isometry(const AttackParams& p) { return EveIsometry(p); }

DensityMatrix initial_state() {
  return tensor(singlet("A", "B"), DensityMatrix::from_ket(PureState::zero(), "E"));
}

DensityMatrix apply_attack(const DensityMatrix& initial, const EveIsometry& iso) {
  for (const char* name : {"A", "B", "E"}) {
    const auto idx = initial.index_of(name);
    if (!idx) throw CompositionError(std::string("apply_attack: missing subsystem ") + name);
    if (initial.labels()[*idx].dim != 2) throw PreconditionError("apply_attack: qubits only");
  }
  if (initial.labels().size() != 3) throw CompositionError("apply_attack: expected [A, B, E]");

  const DensityMatrix rho_e = partial_trace(initial, {"E"});
  if (std::abs(rho_e.matrix()(0, 0) - 1.0) > kStateTol) {
    throw PreconditionError("apply_attack: Eve's ancilla must start in |0>_E");
  }
  // A pure E marginal forces a product state, so the [A, B] reduction is the
  // whole input.
  const DensityMatrix rho_ab = partial_trace(initial, {"A", "B"});

  // (1_A (x) V): 8x4, rows (a, b_out, e), columns (a, b).
  Matrix w = Matrix::Zero(8, 4);
  for (int a = 0; a < 2; ++a) w.block(4 * a, 2 * a, 4, 2) = iso.matrix();
  Matrix out = w * rho_ab.matrix() * w.adjoint();
  return DensityMatrix(std::move(out), qubits({"A", "B", "E"}));
}

Eigen::Matrix2cd bob_channel(const EveIsometry& iso, const Eigen::Matrix2cd& rho_b) {
  const Eigen::Matrix4cd full = iso.matrix() * rho_b * iso.matrix().adjoint();
  Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int e = 0; e < 2; ++e) out(i, j) += full(2 * i + e, 2 * j + e);
    }
  }
  return out;
}

BipartiteReductions bipartite_reductions(const DensityMatrix& rho_abe) {
  return BipartiteReductions{partial_trace(rho_abe, {"A", "B"}), partial_trace(rho_abe, {"A", "E"}),
                             partial_trace(rho_abe, {"B", "E"})};
}

BipartiteReductions attacked_reductions(const AttackParams& p) {
  return bipartite_reductions(apply_attack(initial_state(), build_isometry(p)));
}

}  // namespace cqkd
