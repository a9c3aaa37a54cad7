#pragma once

// Shannon information functionals for two-qubit states: selected information
// (fixed orthogonal bases), non-selected information (the continuous POVM
// |nu><nu| dV over every pure state), and the orientation average relating
// the two.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "cqkd/qstate.hpp"

namespace cqkd {

// 2x2 joint distribution of two binary outcomes.
class JointTable {
 public:
  using Probs = std::array<std::array<double, 2>, 2>;

  // Entries must be >= 0 (roundoff in [-kClampTol, 0) is clamped) and sum to
  // one within 1e-10; otherwise PreconditionError.
  explicit JointTable(const Probs& probs);

  [[nodiscard]] double operator()(int k, int l) const { return p_[k][l]; }
  [[nodiscard]] double marginal_first(int k) const { return p_[k][0] + p_[k][1]; }
  [[nodiscard]] double marginal_second(int l) const { return p_[0][l] + p_[1][l]; }

 private:
  Probs p_;
};

// Shannon entropy in bits with 0 log 0 = 0.
double entropy_bits(std::span<const double> probs);

// I = S_A + S_B - S_AB, evaluated as sum p log2(p / (p_A p_B)).
double mutual_information(const JointTable& table);

struct QuadratureSettings {
  std::size_t polar_nodes = 32;
  std::size_t azimuthal_nodes = 64;

  bool operator==(const QuadratureSettings&) const = default;
};

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(std::size_t n);

// Product rule on the Bloch sphere for the measure dV = sin(theta) dtheta
// dphi / (2 pi): Gauss-Legendre in u = cos(theta) times the uniform
// (midpoint) rule in phi. Total weight is 2.
class SphereQuadrature {
 public:
  explicit SphereQuadrature(QuadratureSettings settings = {});

  [[nodiscard]] std::size_t size() const { return nodes_.size(); }
  [[nodiscard]] const QuadratureSettings& settings() const { return settings_; }
  [[nodiscard]] std::span<const BlochDirection> nodes() const { return nodes_; }
  [[nodiscard]] std::span<const double> weights() const { return weights_; }
  [[nodiscard]] std::span<const PureState> kets() const { return kets_; }
  [[nodiscard]] double total_weight() const;

 private:
  QuadratureSettings settings_;
  std::vector<BlochDirection> nodes_;
  std::vector<double> weights_;
  std::vector<PureState> kets_;
};

// Mutual information of the two orthogonal measurements on a two-qubit state.
// The first label is measured in basis_x, the second in basis_y.
double selected_information(const DensityMatrix& rho_xy, const MeasurementBasis& basis_x,
                            const MeasurementBasis& basis_y);

// Double integral over both Bloch spheres of p log2(p / (p_X p_Y)) with
// p = <alpha, beta| rho |alpha, beta> and marginal densities from the reduced
// states. Rows are evaluated in parallel; the reduction order is fixed.
double nonselected_information(const DensityMatrix& rho_xy, const SphereQuadrature& quad_x,
                               const SphereQuadrature& quad_y);

// (1/V^2) sum_{a,b} w_a w_b I(alpha_a, beta_b): the orientation average of the
// selected information. Agrees with nonselected_information for every state.
double averaged_selected_information(const DensityMatrix& rho_xy, const SphereQuadrature& quad_x,
                                     const SphereQuadrature& quad_y);

}  // namespace cqkd
