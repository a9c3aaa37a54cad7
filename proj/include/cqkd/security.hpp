#pragma once

// Security analysis along Eve's optimal line theta + phi = pi/4: information
// curves, the crossing I_AB = I_AE, error-rate figures of merit, and the
// closed-form scaling with the Alice-Bob dimension.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cqkd/attack.hpp"
#include "cqkd/infocalc.hpp"

namespace cqkd {

inline constexpr double kQuarterPi = kPi / 4.0;

// 1 - 1/(2 ln 2): non-selected information of the singlet, and the accessible
// information of the uniform qubit ensemble.
double singlet_nonselected_bits();

// (theta, pi/4 - theta) for theta in [0, pi/4]; PreconditionError outside.
AttackParams optimal_params(double theta);

// `steps` equally spaced points from 0 to pi/4 inclusive (steps >= 2).
std::vector<double> optimal_line_grid(std::size_t steps);

struct InfoPoint {
  double i_ab = 0.0;
  double i_ae = 0.0;
  double i_be = 0.0;
};

// I_AB, I_AE, I_BE in bits for one attack. With reconciled set, I_AB is the
// sifted selected information (reconciled_i_ab); I_AE and I_BE stay
// non-selected.
InfoPoint evaluate_attack(const AttackParams& p, bool reconciled, const SphereQuadrature& quad);

struct InfoCurve {
  std::vector<double> thetas;
  std::vector<double> i_ab;
  std::vector<double> i_ae;
  std::vector<double> i_be;
  bool reconciled = false;
};

// Grid must be strictly increasing inside [0, pi/4].
InfoCurve sweep_curve(std::span<const double> grid, bool reconciled, const SphereQuadrature& quad);

// Sphere average of the selected information when Alice and Bob use the same
// basis direction (ideal, zero-width reconciliation cells).
double reconciled_i_ab(const DensityMatrix& rho_ab, const SphereQuadrature& quad);

// q = 1 - Tr rho_B^(1) rho_B^(2) with rho_B^(1) a computational-basis letter
// |k> and rho_B^(2) its image under Eve's channel, averaged over k. Equals
// sin^2(theta) for the two-angle attack.
double qber(const AttackParams& p);

// Sphere-averaged conditional disturbance 1 - (1/V) int <psi|L(psi)|psi> dV:
// the error rate of sifted continuous-alphabet rounds.
double sphere_qber(const AttackParams& p, const SphereQuadrature& quad);

// Q = 1 - i / i_max. Rejects i_max <= 0, i < 0 and i > i_max beyond 1e-9.
double cier(double i, double i_max);

struct SecurityReport {
  bool reconciled = false;
  double tolerance = 0.0;
  std::size_t evaluations = 0;

  double theta0 = 0.0;
  double i0 = 0.0;     // I_AB at the crossing
  double i_ae0 = 0.0;  // I_AE at the crossing
  double q0 = 0.0;     // qber()
  double q0_sphere = 0.0;
  double i_max = 0.0;  // I_AB without attack, same mode and quadrature
  double q_cier0 = 0.0;

  // Alternative readings of the figures of merit, printed side by side.
  double info_ratio = 0.0;                      // i0 / i_max
  std::optional<double> cier_nonselected_norm;  // I_max = singlet non-selected value
  std::optional<double> cier_selected_norm;     // I_max = 1 bit
  double sin_theta0 = 0.0;
  double sin2_theta0 = 0.0;
};

// Bisection on g(theta) = I_AB - I_AE along the optimal line. The endpoints
// must satisfy g(0) > 0 > g(pi/4); otherwise BracketError.
SecurityReport critical_point(bool reconciled, const SphereQuadrature& quad, double tol);

// log2 d - (1/ln 2) sum_{k=2}^{d} 1/k, for d >= 2.
double accessible_information(std::size_t d);

// 1 - accessible_information(d) / log2 d.
double critical_cier_dim(std::size_t d);

struct DimensionRow {
  std::size_t d = 0;
  double accessible_bits = 0.0;
  double i_max_bits = 0.0;
  double critical_cier = 0.0;
};

// Rows for d = 2..d_max, built incrementally.
std::vector<DimensionRow> dimension_table(std::size_t d_max);

}  // namespace cqkd
