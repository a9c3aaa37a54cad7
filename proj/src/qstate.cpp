#include "cqkd/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cqkd/error.hpp"

namespace cqkd {

namespace {

double wrap_angle(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

std::size_t product_dim(const Labels& labels) {
  std::size_t d = 1;
  for (const auto& s : labels) d *= s.dim;
  return d;
}

// Digits of a flat index, most significant subsystem first (Kronecker order).
std::vector<std::size_t> digits_of(std::size_t index, const Labels& labels) {
  std::vector<std::size_t> out(labels.size());
  for (std::size_t k = labels.size(); k-- > 0;) {
    out[k] = index % labels[k].dim;
    index /= labels[k].dim;
  }
  return out;
}

Eigen::VectorXcd kron(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  Eigen::VectorXcd out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// BlochDirection

BlochDirection BlochDirection::from_cos(double u, double phi) {
  return BlochDirection{std::acos(std::clamp(u, -1.0, 1.0)), wrap_angle(phi)};
}

BlochDirection BlochDirection::canonical() const {
  double t = wrap_angle(theta);
  double p = phi;
  if (t > kPi) {
    t = kTwoPi - t;
    p += kPi;
  }
  return BlochDirection{t, wrap_angle(p)};
}

BlochDirection BlochDirection::antipode() const {
  return BlochDirection{kPi - theta, wrap_angle(phi + kPi)};
}

std::array<double, 3> BlochDirection::bloch_vector() const {
  const double s = std::sin(theta);
  return {s * std::cos(phi), s * std::sin(phi), std::cos(theta)};
}

double angle_between(const BlochDirection& a, const BlochDirection& b) {
  const auto x = a.bloch_vector();
  const auto y = b.bloch_vector();
  const double c = x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
  return std::acos(std::clamp(c, -1.0, 1.0));
}

// ---------------------------------------------------------------------------
// PureState

PureState::PureState(Complex a0, Complex a1) : amp_{a0, a1} {
  const double n2 = std::norm(a0) + std::norm(a1);
  if (std::abs(n2 - 1.0) > kStateTol) {
    std::ostringstream msg;
    msg << "PureState: squared norm " << n2 << " is not 1";
    throw PreconditionError(msg.str());
  }
  const Complex lead = std::abs(a0) > kStateTol ? a0 : a1;
  const Complex unphase = std::conj(lead) / std::abs(lead);
  amp_[0] *= unphase;
  amp_[1] *= unphase;
  // The leading amplitude is real by construction; drop its roundoff.
  if (std::abs(a0) > kStateTol) {
    amp_[0] = std::abs(amp_[0]);
  } else {
    amp_[1] = std::abs(amp_[1]);
  }
}

PureState PureState::normalized(Complex a0, Complex a1) {
  const double n = std::sqrt(std::norm(a0) + std::norm(a1));
  if (!(n > 0.0)) throw PreconditionError("PureState: zero vector");
  return PureState(a0 / n, a1 / n);
}

Complex PureState::inner(const PureState& other) const {
  return std::conj(amp_[0]) * other.amp_[0] + std::conj(amp_[1]) * other.amp_[1];
}

bool PureState::approx_equal(const PureState& other, double tol) const {
  return std::abs(amp_[0] - other.amp_[0]) <= tol && std::abs(amp_[1] - other.amp_[1]) <= tol;
}

PureState ket_from_bloch(const BlochDirection& d) {
  return PureState(std::cos(d.theta / 2.0), std::polar(std::sin(d.theta / 2.0), d.phi));
}

Labels qubits(std::initializer_list<std::string_view> names) {
  Labels out;
  for (auto n : names) out.push_back(Subsystem{std::string(n), 2});
  return out;
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(Matrix entries, Labels labels)
    : rho_(std::move(entries)), labels_(std::move(labels)) {
  if (labels_.empty()) throw CompositionError("DensityMatrix: no subsystem labels");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i].dim == 0) throw CompositionError("DensityMatrix: zero-dimensional subsystem");
    for (std::size_t j = i + 1; j < labels_.size(); ++j) {
      if (labels_[i].name == labels_[j].name) {
        throw CompositionError("DensityMatrix: duplicate label '" + labels_[i].name + "'");
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(product_dim(labels_));
  if (rho_.rows() != n || rho_.cols() != n) {
    throw CompositionError("DensityMatrix: matrix size does not match label dimensions");
  }
  const double asym = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 2.0 * kStateTol) {
    throw NumericalError("DensityMatrix: not Hermitian (deviation " + std::to_string(asym) + ")");
  }
  rho_ = (0.5 * (rho_ + rho_.adjoint())).eval();
  if (std::abs(trace() - 1.0) > kStateTol) {
    throw NumericalError("DensityMatrix: trace " + std::to_string(trace()) + " != 1");
  }
  if (min_eigenvalue() < -kNegativeEigenTol) {
    throw NumericalError("DensityMatrix: negative eigenvalue " + std::to_string(min_eigenvalue()));
  }
}

DensityMatrix DensityMatrix::from_ket(const Eigen::VectorXcd& ket, Labels labels) {
  return DensityMatrix(ket * ket.adjoint(), std::move(labels));
}

DensityMatrix DensityMatrix::from_ket(const PureState& ket, std::string name) {
  Eigen::VectorXcd v(2);
  v << ket[0], ket[1];
  return from_ket(v, Labels{Subsystem{std::move(name), 2}});
}

DensityMatrix DensityMatrix::maximally_mixed(Labels labels) {
  const auto n = static_cast<Eigen::Index>(product_dim(labels));
  Matrix m = Matrix::Identity(n, n) / static_cast<double>(n);
  return DensityMatrix(std::move(m), std::move(labels));
}

std::optional<std::size_t> DensityMatrix::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i].name == name) return i;
  }
  return std::nullopt;
}

double DensityMatrix::trace() const { return rho_.trace().real(); }

double DensityMatrix::purity() const { return (rho_ * rho_).trace().real(); }

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// ---------------------------------------------------------------------------
// Composition

DensityMatrix singlet(std::string_view first, std::string_view second) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
  v(1) = 1.0 / std::numbers::sqrt2;   // |01>
  v(2) = -1.0 / std::numbers::sqrt2;  // |10>
  return DensityMatrix::from_ket(v, qubits({first, second}));
}

DensityMatrix tensor(const DensityMatrix& rho, const DensityMatrix& sigma) {
  for (const auto& s : sigma.labels()) {
    if (rho.index_of(s.name)) {
      throw CompositionError("tensor: label '" + s.name + "' appears on both factors");
    }
  }
  const Matrix& a = rho.matrix();
  const Matrix& b = sigma.matrix();
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  Labels labels = rho.labels();
  labels.insert(labels.end(), sigma.labels().begin(), sigma.labels().end());
  return DensityMatrix(std::move(out), std::move(labels));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::string> keep) {
  if (keep.empty()) throw CompositionError("partial_trace: nothing to keep");
  const Labels& labels = rho.labels();
  std::vector<bool> kept(labels.size(), false);
  for (const auto& name : keep) {
    const auto idx = rho.index_of(name);
    if (!idx) throw CompositionError("partial_trace: unknown label '" + name + "'");
    kept[*idx] = true;
  }
  Labels out_labels;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (kept[k]) out_labels.push_back(labels[k]);
  }
  const auto n_out = static_cast<Eigen::Index>(product_dim(out_labels));
  Matrix out = Matrix::Zero(n_out, n_out);

  const std::size_t n = rho.dim();
  std::vector<std::vector<std::size_t>> digits(n);
  std::vector<Eigen::Index> reduced(n);
  for (std::size_t i = 0; i < n; ++i) {
    digits[i] = digits_of(i, labels);
    Eigen::Index r = 0;
    for (std::size_t k = 0; k < labels.size(); ++k) {
      if (kept[k]) r = r * static_cast<Eigen::Index>(labels[k].dim) + digits[i][k];
    }
    reduced[i] = r;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      bool same_traced = true;
      for (std::size_t k = 0; k < labels.size() && same_traced; ++k) {
        if (!kept[k] && digits[i][k] != digits[j][k]) same_traced = false;
      }
      if (same_traced) {
        out(reduced[i], reduced[j]) += rho.matrix()(static_cast<Eigen::Index>(i),
                                                    static_cast<Eigen::Index>(j));
      }
    }
  }
  return DensityMatrix(std::move(out), std::move(out_labels));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<std::string> keep) {
  return partial_trace(rho, std::span<const std::string>(keep.begin(), keep.size()));
}

double overlap(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.labels() != sigma.labels()) throw CompositionError("overlap: label mismatch");
  return (rho.matrix() * sigma.matrix()).trace().real();
}

double clamp_probability(double p) {
  if (p < -kCorruptionTol) {
    throw NumericalError("negative probability " + std::to_string(p));
  }
  return p < 0.0 ? 0.0 : p;
}

double expectation(const DensityMatrix& rho, std::span<const PureState> kets) {
  if (kets.size() != rho.labels().size()) {
    throw PreconditionError("expectation: need exactly one ket per subsystem");
  }
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(1);
  for (std::size_t k = 0; k < kets.size(); ++k) {
    if (rho.labels()[k].dim != 2) throw PreconditionError("expectation: qubit subsystems only");
    Eigen::VectorXcd q(2);
    q << kets[k][0], kets[k][1];
    v = kron(v, q);
  }
  const double p = (v.adjoint() * rho.matrix() * v)(0, 0).real();
  return clamp_probability(p);
}

double expectation(const DensityMatrix& rho, std::initializer_list<PureState> kets) {
  return expectation(rho, std::span<const PureState>(kets.begin(), kets.size()));
}

// ---------------------------------------------------------------------------
// MeasurementBasis

MeasurementBasis::MeasurementBasis(BlochDirection direction)
    : direction_(direction.canonical()),
      kets_{ket_from_bloch(direction_), ket_from_bloch(direction_.antipode())} {}

Eigen::Matrix2cd MeasurementBasis::projector(int outcome) const {
  const PureState& k = kets_[static_cast<std::size_t>(outcome)];
  Eigen::Vector2cd v(k[0], k[1]);
  return v * v.adjoint();
}

}  // namespace cqkd
