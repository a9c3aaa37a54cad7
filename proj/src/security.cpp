#include "cqkd/security.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cqkd/bisect.hpp"
#include "cqkd/error.hpp"
#include "cqkd/parallel.hpp"

namespace cqkd {

namespace {

constexpr double kAngleSlack = 1e-12;
constexpr double kCierSlack = 1e-9;

std::optional<double> cier_if_valid(double i, double i_max) {
  if (i_max <= 0.0 || i < -kCierSlack || i > i_max + kCierSlack) return std::nullopt;
  return cier(i, i_max);
}

}  // namespace

double singlet_nonselected_bits() { return 1.0 - 1.0 / (2.0 * std::numbers::ln2); }

AttackParams optimal_params(double theta) {
  if (!(theta >= -kAngleSlack && theta <= kQuarterPi + kAngleSlack)) {
    throw PreconditionError("optimal_params: theta " + std::to_string(theta) +
                            " outside [0, pi/4]");
  }
  theta = std::clamp(theta, 0.0, kQuarterPi);
  return AttackParams{theta, kQuarterPi - theta};
}

std::vector<double> optimal_line_grid(std::size_t steps) {
  if (steps < 2) throw PreconditionError("optimal_line_grid: need at least 2 points");
  std::vector<double> grid(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    grid[i] = kQuarterPi * static_cast<double>(i) / static_cast<double>(steps - 1);
  }
  grid.back() = kQuarterPi;
  return grid;
}

InfoPoint evaluate_attack(const AttackParams& p, bool reconciled, const SphereQuadrature& quad) {
  const BipartiteReductions red = attacked_reductions(p);
  InfoPoint out;
  out.i_ab = reconciled ? reconciled_i_ab(red.ab, quad) : nonselected_information(red.ab, quad, quad);
  out.i_ae = nonselected_information(red.ae, quad, quad);
  out.i_be = nonselected_information(red.be, quad, quad);
  return out;
}

InfoCurve sweep_curve(std::span<const double> grid, bool reconciled, const SphereQuadrature& quad) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < -kAngleSlack || grid[i] > kQuarterPi + kAngleSlack) {
      throw PreconditionError("sweep_curve: grid point outside [0, pi/4]");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw PreconditionError("sweep_curve: grid must be strictly increasing");
    }
  }
  InfoCurve curve;
  curve.reconciled = reconciled;
  for (double theta : grid) {
    const InfoPoint pt = evaluate_attack(optimal_params(theta), reconciled, quad);
    curve.thetas.push_back(theta);
    curve.i_ab.push_back(pt.i_ab);
    curve.i_ae.push_back(pt.i_ae);
    curve.i_be.push_back(pt.i_be);
  }
  return curve;
}

double reconciled_i_ab(const DensityMatrix& rho_ab, const SphereQuadrature& quad) {
  const auto nodes = quad.nodes();
  const auto weights = quad.weights();
  std::vector<double> terms(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) {
    const MeasurementBasis basis(nodes[i]);
    terms[i] = weights[i] * selected_information(rho_ab, basis, basis);
  });
  CompensatedSum s;
  for (double t : terms) s.add(t);
  return s.value() / quad.total_weight();
}

double qber(const AttackParams& p) {
  const EveIsometry iso(p);
  double fidelity = 0.0;
  for (int k = 0; k < 2; ++k) {
    Eigen::Matrix2cd letter = Eigen::Matrix2cd::Zero();
    letter(k, k) = 1.0;
    fidelity += bob_channel(iso, letter)(k, k).real();
  }
  return std::clamp(1.0 - 0.5 * fidelity, 0.0, 1.0);
}

double sphere_qber(const AttackParams& p, const SphereQuadrature& quad) {
  const EveIsometry iso(p);
  CompensatedSum s;
  const auto kets = quad.kets();
  for (std::size_t i = 0; i < kets.size(); ++i) {
    const Eigen::Vector2cd psi(kets[i][0], kets[i][1]);
    const Eigen::Matrix2cd out = bob_channel(iso, psi * psi.adjoint());
    s.add(quad.weights()[i] * (psi.adjoint() * out * psi)(0, 0).real());
  }
  return std::clamp(1.0 - s.value() / quad.total_weight(), 0.0, 1.0);
}

double cier(double i, double i_max) {
  if (!(i_max > 0.0)) throw PreconditionError("cier: i_max must be positive");
  if (i < -kCierSlack || i > i_max + kCierSlack) {
    throw PreconditionError("cier: information " + std::to_string(i) + " outside [0, " +
                            std::to_string(i_max) + "]");
  }
  return std::clamp(1.0 - i / i_max, 0.0, 1.0);
}

SecurityReport critical_point(bool reconciled, const SphereQuadrature& quad, double tol) {
  if (!(tol > 0.0)) throw PreconditionError("critical_point: tolerance must be positive");
  auto g = [&](double theta) {
    const AttackParams p = optimal_params(theta);
    const BipartiteReductions red = attacked_reductions(p);
    const double i_ab = reconciled ? reconciled_i_ab(red.ab, quad)
                                   : nonselected_information(red.ab, quad, quad);
    return i_ab - nonselected_information(red.ae, quad, quad);
  };
  const InfoPoint start = evaluate_attack(optimal_params(0.0), reconciled, quad);
  if (!(start.i_ab > 0.0)) {
    throw NumericalError("critical_point: I_AB vanishes without attack; quadrature too coarse");
  }
  const InfoPoint end = evaluate_attack(optimal_params(kQuarterPi), reconciled, quad);
  const BisectionResult root =
      bisect(g, 0.0, kQuarterPi, start.i_ab - start.i_ae, end.i_ab - end.i_ae, tol);

  const AttackParams at = optimal_params(root.root);
  const InfoPoint crossing = evaluate_attack(at, reconciled, quad);

  SecurityReport r;
  r.reconciled = reconciled;
  r.tolerance = tol;
  r.evaluations = root.evaluations;
  r.theta0 = root.root;
  r.i0 = crossing.i_ab;
  r.i_ae0 = crossing.i_ae;
  r.q0 = qber(at);
  r.q0_sphere = sphere_qber(at, quad);
  r.i_max = start.i_ab;
  r.q_cier0 = cier(std::min(r.i0, r.i_max), r.i_max);
  r.info_ratio = r.i0 / r.i_max;
  r.cier_nonselected_norm = cier_if_valid(r.i0, singlet_nonselected_bits());
  r.cier_selected_norm = cier_if_valid(r.i0, 1.0);
  r.sin_theta0 = std::sin(r.theta0);
  r.sin2_theta0 = r.sin_theta0 * r.sin_theta0;
  return r;
}

double accessible_information(std::size_t d) {
  if (d < 2) throw PreconditionError("accessible_information: dimension must be >= 2");
  CompensatedSum harmonic;
  for (std::size_t k = 2; k <= d; ++k) harmonic.add(1.0 / static_cast<double>(k));
  return std::log2(static_cast<double>(d)) - harmonic.value() / std::numbers::ln2;
}

double critical_cier_dim(std::size_t d) {
  return 1.0 - accessible_information(d) / std::log2(static_cast<double>(d));
}

std::vector<DimensionRow> dimension_table(std::size_t d_max) {
  if (d_max < 2) throw PreconditionError("dimension_table: d_max must be >= 2");
  std::vector<DimensionRow> rows;
  rows.reserve(d_max - 1);
  CompensatedSum harmonic;
  for (std::size_t d = 2; d <= d_max; ++d) {
    harmonic.add(1.0 / static_cast<double>(d));
    const double log_d = std::log2(static_cast<double>(d));
    const double acc = log_d - harmonic.value() / std::numbers::ln2;
    rows.push_back(DimensionRow{d, acc, log_d, 1.0 - acc / log_d});
  }
  return rows;
}

}  // namespace cqkd
