#pragma once

// Finite-dimensional state algebra for qubit registers: Bloch-sphere
// directions, kets, labeled density matrices, tensor products and partial
// traces.

#include <array>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace cqkd {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Tolerances shared by every state-level invariant check.
inline constexpr double kStateTol = 1e-12;
inline constexpr double kNegativeEigenTol = 1e-10;
// Probabilities in [-kClampTol, 0) are roundoff and clamp to zero; anything
// below -kCorruptionTol is a logic error.
inline constexpr double kClampTol = 1e-12;
inline constexpr double kCorruptionTol = 1e-10;

// Point on the Bloch sphere: theta polar in [0, pi], phi azimuthal in [0, 2pi).
struct BlochDirection {
  double theta = 0.0;
  double phi = 0.0;

  // From u = cos(theta), which is the coordinate the sphere measure is flat in.
  static BlochDirection from_cos(double u, double phi);

  [[nodiscard]] BlochDirection canonical() const;
  [[nodiscard]] BlochDirection antipode() const;
  [[nodiscard]] std::array<double, 3> bloch_vector() const;

  bool operator==(const BlochDirection&) const = default;
};

// Angle between two directions, in [0, pi].
double angle_between(const BlochDirection& a, const BlochDirection& b);

// Normalized qubit ket with the first nonzero amplitude real and nonnegative.
class PureState {
 public:
  // Throws PreconditionError unless |a0|^2 + |a1|^2 = 1 within kStateTol.
  PureState(Complex a0, Complex a1);

  static PureState normalized(Complex a0, Complex a1);
  static PureState zero() { return {1.0, 0.0}; }
  static PureState one() { return {0.0, 1.0}; }

  [[nodiscard]] Complex operator[](std::size_t i) const { return amp_[i]; }
  [[nodiscard]] const std::array<Complex, 2>& amplitudes() const { return amp_; }

  // <this|other>
  [[nodiscard]] Complex inner(const PureState& other) const;
  [[nodiscard]] bool approx_equal(const PureState& other, double tol = kStateTol) const;

  bool operator==(const PureState&) const = default;

 private:
  std::array<Complex, 2> amp_;
};

// (cos(theta/2), e^{i phi} sin(theta/2)); antipodal directions give orthogonal kets.
PureState ket_from_bloch(const BlochDirection& d);

struct Subsystem {
  std::string name;
  std::size_t dim = 2;

  bool operator==(const Subsystem&) const = default;
};

using Labels = std::vector<Subsystem>;

Labels qubits(std::initializer_list<std::string_view> names);

// Hermitian, unit-trace, positive semidefinite operator on a labeled tensor
// product space. Immutable once built.
class DensityMatrix {
 public:
  // Validates Hermiticity, trace and positivity, then symmetrizes away the
  // residual anti-Hermitian roundoff. Throws NumericalError on violation and
  // CompositionError on malformed labels.
  DensityMatrix(Matrix entries, Labels labels);

  static DensityMatrix from_ket(const Eigen::VectorXcd& ket, Labels labels);
  static DensityMatrix from_ket(const PureState& ket, std::string name);
  static DensityMatrix maximally_mixed(Labels labels);

  [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(rho_.rows()); }
  [[nodiscard]] const Matrix& matrix() const { return rho_; }
  [[nodiscard]] const Labels& labels() const { return labels_; }
  [[nodiscard]] std::optional<std::size_t> index_of(std::string_view name) const;

  [[nodiscard]] double trace() const;
  [[nodiscard]] double purity() const;
  [[nodiscard]] double min_eigenvalue() const;

 private:
  Matrix rho_;
  Labels labels_;
};

// |psi-> = (|01> - |10>)/sqrt(2) projector on labels [A, B].
DensityMatrix singlet(std::string_view first = "A", std::string_view second = "B");

// Kronecker product, labels concatenated. Duplicate labels throw CompositionError.
DensityMatrix tensor(const DensityMatrix& rho, const DensityMatrix& sigma);

// Reduced state on `keep`; kept subsystems retain their original order.
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::string> keep);
DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<std::string> keep);

// Re Tr(rho sigma); labels must match.
double overlap(const DensityMatrix& rho, const DensityMatrix& sigma);

// <k1 ... kn| rho |k1 ... kn> with one qubit ket per label, clamped to zero
// inside [-kClampTol, 0). Below -kCorruptionTol throws NumericalError.
double expectation(const DensityMatrix& rho, std::span<const PureState> kets);
double expectation(const DensityMatrix& rho, std::initializer_list<PureState> kets);

// Applies the clamp/corruption policy of expectation() to a raw value.
double clamp_probability(double p);

// Orthogonal measurement {|nu>, |nu~>}; outcome 0 is |nu>, outcome 1 the
// antipodal ket.
class MeasurementBasis {
 public:
  explicit MeasurementBasis(BlochDirection direction);

  [[nodiscard]] const BlochDirection& direction() const { return direction_; }
  [[nodiscard]] const PureState& ket(int outcome) const { return kets_[outcome]; }
  [[nodiscard]] Eigen::Matrix2cd projector(int outcome) const;

 private:
  BlochDirection direction_;
  std::array<PureState, 2> kets_;
};

}  // namespace cqkd
