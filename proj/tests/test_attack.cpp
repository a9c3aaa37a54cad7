#include <doctest.h>

#include <cmath>

#include "cqkd/attack.hpp"
#include "cqkd/error.hpp"
#include "support.hpp"

using namespace cqkd;
using cqkd::testing::Gen;
using cqkd::testing::max_abs_diff;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

bool eve_ket_is(const EveIsometry::EveKet& k, Complex c0, Complex c1, double tol = 1e-15) {
  return std::abs(k[0] - c0) < tol && std::abs(k[1] - c1) < tol;
}

Matrix product(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("gamma values") {
  CHECK(gamma(0, 0, {0.0, 0.0}) == 1.0);
  CHECK(gamma(1, 1, {0.0, 0.0}) == 0.0);
  CHECK(gamma(1, 1, {kPi / 4.0, kPi / 4.0}) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(gamma(0, 1, {0.0, kPi / 4.0}) == doctest::Approx(kInvSqrt2).epsilon(1e-15));
  CHECK_THROWS_AS(gamma(2, 0, {0.0, 0.0}), PreconditionError);
}

TEST_CASE("isometry at (0, 0) copies Bob's bit into Eve's register") {
  const EveIsometry iso = build_isometry({0.0, 0.0});
  CHECK(eve_ket_is(iso.phi_state(0, 0), 1.0, 0.0));
  CHECK(eve_ket_is(iso.phi_state(0, 1), 0.0, 0.0));
  CHECK(eve_ket_is(iso.phi_state(1, 0), 0.0, 0.0));
  CHECK(eve_ket_is(iso.phi_state(1, 1), 0.0, 1.0));
}

TEST_CASE("isometry at (0, pi/4) leaves Bob untouched") {
  const EveIsometry iso = build_isometry({0.0, kPi / 4.0});
  CHECK(eve_ket_is(iso.phi_state(0, 0), kInvSqrt2, kInvSqrt2));
  CHECK(eve_ket_is(iso.phi_state(0, 1), 0.0, 0.0));
  CHECK(eve_ket_is(iso.phi_state(1, 0), 0.0, 0.0));
  CHECK(eve_ket_is(iso.phi_state(1, 1), kInvSqrt2, kInvSqrt2));
}

TEST_CASE("isometry at (pi/4, 0) sends Bob to |+> and hands Eve the bit") {
  const EveIsometry iso = build_isometry({kPi / 4.0, 0.0});
  CHECK(eve_ket_is(iso.phi_state(0, 0), kInvSqrt2, 0.0));
  CHECK(eve_ket_is(iso.phi_state(0, 1), kInvSqrt2, 0.0));
  CHECK(eve_ket_is(iso.phi_state(1, 0), 0.0, kInvSqrt2));
  CHECK(eve_ket_is(iso.phi_state(1, 1), 0.0, kInvSqrt2));

  Gen gen(21);
  for (int i = 0; i < 20; ++i) {
    const PureState psi = ket_from_bloch(gen.direction());
    Eigen::Matrix2cd rho;
    rho << psi[0] * std::conj(psi[0]), psi[0] * std::conj(psi[1]), psi[1] * std::conj(psi[0]),
        psi[1] * std::conj(psi[1]);
    CHECK((bob_channel(iso, rho) - cqkd::testing::plus_projector()).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("orthogonality and normalization identities for random angles") {
  Gen gen(22);
  for (int i = 0; i < 1000; ++i) {
    const AttackParams p = gen.attack();
    const EveIsometry iso = build_isometry(p);
    const auto norms = iso.column_norms();
    INFO("theta=" << p.theta << " phi=" << p.phi);
    CHECK(std::abs(iso.orthogonality_defect()) < 1e-12);
    CHECK(std::abs(norms[0] - 1.0) < 1e-12);
    CHECK(std::abs(norms[1] - 1.0) < 1e-12);
    const Eigen::Matrix2cd gram = iso.matrix().adjoint() * iso.matrix();
    CHECK((gram - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("attack preserves trace and purity and never touches A") {
  Gen gen(23);
  const DensityMatrix start = initial_state();
  const Matrix half = Matrix::Identity(2, 2) * 0.5;
  for (int i = 0; i < 100; ++i) {
    const AttackParams p = gen.attack();
    const DensityMatrix out = apply_attack(start, build_isometry(p));
    CHECK(std::abs(out.trace() - 1.0) < 1e-12);
    CHECK(std::abs(out.purity() - 1.0) < 1e-10);
    const BipartiteReductions red = bipartite_reductions(out);
    CHECK(max_abs_diff(partial_trace(out, {"A"}).matrix(), half) < 1e-12);
    CHECK(max_abs_diff(partial_trace(red.ab, {"A"}).matrix(), half) < 1e-12);
    CHECK(max_abs_diff(partial_trace(red.ae, {"A"}).matrix(), half) < 1e-12);
  }
}

TEST_CASE("zero-attack endpoint: Alice and Bob keep the singlet, Eve factors out") {
  const BipartiteReductions red = attacked_reductions({0.0, kPi / 4.0});
  CHECK(max_abs_diff(red.ab.matrix(), singlet().matrix()) < 1e-15);
  Matrix plus(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;
  const Matrix half = Matrix::Identity(2, 2) * 0.5;
  CHECK(max_abs_diff(red.ae.matrix(), product(half, plus)) < 1e-15);
  CHECK(max_abs_diff(red.be.matrix(), product(half, plus)) < 1e-15);
  CHECK(red.ab.labels() == qubits({"A", "B"}));
  CHECK(red.ae.labels() == qubits({"A", "E"}));
  CHECK(red.be.labels() == qubits({"B", "E"}));
}

TEST_CASE("maximal-attack endpoint: Alice and Eve share the singlet") {
  const BipartiteReductions red = attacked_reductions({kPi / 4.0, 0.0});
  CHECK(max_abs_diff(red.ae.matrix(), singlet("A", "E").matrix()) < 1e-15);
  Matrix plus(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;
  const Matrix half = Matrix::Identity(2, 2) * 0.5;
  CHECK(max_abs_diff(red.ab.matrix(), product(half, plus)) < 1e-15);
}

TEST_CASE("the (0, 0) attack is a controlled copy, not the identity") {
  const BipartiteReductions red = attacked_reductions({0.0, 0.0});
  Matrix expected_be = Matrix::Zero(4, 4);
  expected_be(0, 0) = 0.5;
  expected_be(3, 3) = 0.5;
  CHECK(max_abs_diff(red.be.matrix(), expected_be) < 1e-15);
  CHECK(overlap(red.ab, singlet()) == doctest::Approx(0.5));
}

TEST_CASE("apply_attack requires Eve's ancilla in |0>") {
  const DensityMatrix wrong = tensor(singlet(), DensityMatrix::from_ket(PureState::one(), "E"));
  CHECK_THROWS_AS(apply_attack(wrong, build_isometry({0.1, 0.2})), PreconditionError);
  const DensityMatrix mixed = tensor(singlet(), DensityMatrix::maximally_mixed(qubits({"E"})));
  CHECK_THROWS_AS(apply_attack(mixed, build_isometry({0.1, 0.2})), PreconditionError);
  CHECK_THROWS_AS(apply_attack(singlet(), build_isometry({0.1, 0.2})), CompositionError);
}
