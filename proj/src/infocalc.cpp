#include "cqkd/infocalc.hpp"

#include <cmath>
#include <string>

#include "cqkd/error.hpp"
#include "cqkd/parallel.hpp"

namespace cqkd {

namespace {

constexpr double kTableSumTol = 1e-10;
constexpr double kNegativeInfoTol = 1e-9;
// Below this a density contributes nothing (0 log 0 = 0).
constexpr double kTinyDensity = 1e-300;

double xlog2_ratio(double p, double q) {
  if (p < kTinyDensity || q < kTinyDensity) return 0.0;
  return p * std::log2(p / q);
}

double clamp_information(double bits) {
  if (bits < -kNegativeInfoTol) {
    throw NumericalError("negative mutual information " + std::to_string(bits));
  }
  return bits < 0.0 ? 0.0 : bits;
}

void require_two_qubits(const DensityMatrix& rho, const char* where) {
  if (rho.labels().size() != 2 || rho.labels()[0].dim != 2 || rho.labels()[1].dim != 2) {
    throw PreconditionError(std::string(where) + ": expected a two-qubit state");
  }
}

// Fast evaluation of <alpha, beta| rho |alpha, beta> for many ket pairs:
// contract the first factor once per alpha, then each beta is a 2x2 form.
class PairDensity {
 public:
  explicit PairDensity(const DensityMatrix& rho) : rho_(rho.matrix()) {}

  [[nodiscard]] Eigen::Matrix2cd contract_first(const PureState& a) const {
    Eigen::Matrix2cd x = Eigen::Matrix2cd::Zero();
    for (int i = 0; i < 2; ++i) {
      for (int k = 0; k < 2; ++k) {
        const Complex c = std::conj(a[i]) * a[k];
        for (int j = 0; j < 2; ++j) {
          for (int l = 0; l < 2; ++l) x(j, l) += c * rho_(2 * i + j, 2 * k + l);
        }
      }
    }
    return x;
  }

  static double form(const Eigen::Matrix2cd& x, const PureState& b) {
    const Complex v = std::conj(b[0]) * (x(0, 0) * b[0] + x(0, 1) * b[1]) +
                      std::conj(b[1]) * (x(1, 0) * b[0] + x(1, 1) * b[1]);
    return clamp_probability(v.real());
  }

 private:
  Matrix rho_;
};

double single_density(const DensityMatrix& rho1, const PureState& k) {
  return expectation(rho1, {k});
}

}  // namespace

// ---------------------------------------------------------------------------

JointTable::JointTable(const Probs& probs) : p_(probs) {
  double total = 0.0;
  for (auto& row : p_) {
    for (double& v : row) {
      if (v < -kClampTol) throw PreconditionError("JointTable: negative entry");
      if (v < 0.0) v = 0.0;
      total += v;
    }
  }
  if (std::abs(total - 1.0) > kTableSumTol) {
    throw PreconditionError("JointTable: entries sum to " + std::to_string(total));
  }
}

double entropy_bits(std::span<const double> probs) {
  CompensatedSum s;
  for (double p : probs) {
    if (p > kTinyDensity) s.add(-p * std::log2(p));
  }
  return s.value();
}

double mutual_information(const JointTable& t) {
  CompensatedSum s;
  for (int k = 0; k < 2; ++k) {
    for (int l = 0; l < 2; ++l) {
      s.add(xlog2_ratio(t(k, l), t.marginal_first(k) * t.marginal_second(l)));
    }
  }
  return clamp_information(s.value());
}

// ---------------------------------------------------------------------------

GaussLegendre gauss_legendre(std::size_t n) {
  if (n == 0) throw PreconditionError("gauss_legendre: need at least one node");
  GaussLegendre gl{std::vector<double>(n), std::vector<double>(n)};
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(kPi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    gl.nodes[i] = -x;
    gl.nodes[n - 1 - i] = x;
    gl.weights[i] = w;
    gl.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) gl.nodes[n / 2] = 0.0;
  return gl;
}

SphereQuadrature::SphereQuadrature(QuadratureSettings settings) : settings_(settings) {
  if (settings.polar_nodes == 0 || settings.azimuthal_nodes == 0) {
    throw PreconditionError("SphereQuadrature: node counts must be positive");
  }
  const GaussLegendre gl = gauss_legendre(settings.polar_nodes);
  const auto n_phi = static_cast<double>(settings.azimuthal_nodes);
  nodes_.reserve(settings.polar_nodes * settings.azimuthal_nodes);
  for (std::size_t i = 0; i < settings.polar_nodes; ++i) {
    for (std::size_t j = 0; j < settings.azimuthal_nodes; ++j) {
      const double phi = kTwoPi * (static_cast<double>(j) + 0.5) / n_phi;
      nodes_.push_back(BlochDirection::from_cos(gl.nodes[i], phi));
      // Gauss weight in u times dphi / (2 pi).
      weights_.push_back(gl.weights[i] / n_phi);
      kets_.push_back(ket_from_bloch(nodes_.back()));
    }
  }
}

double SphereQuadrature::total_weight() const {
  CompensatedSum s;
  for (double w : weights_) s.add(w);
  return s.value();
}

// ---------------------------------------------------------------------------

double selected_information(const DensityMatrix& rho_xy, const MeasurementBasis& basis_x,
                            const MeasurementBasis& basis_y) {
  require_two_qubits(rho_xy, "selected_information");
  JointTable::Probs probs{};
  for (int k = 0; k < 2; ++k) {
    for (int l = 0; l < 2; ++l) {
      probs[k][l] = expectation(rho_xy, {basis_x.ket(k), basis_y.ket(l)});
    }
  }
  return mutual_information(JointTable(probs));
}

double nonselected_information(const DensityMatrix& rho_xy, const SphereQuadrature& quad_x,
                               const SphereQuadrature& quad_y) {
  require_two_qubits(rho_xy, "nonselected_information");
  const DensityMatrix rho_x = partial_trace(rho_xy, {rho_xy.labels()[0].name});
  const DensityMatrix rho_y = partial_trace(rho_xy, {rho_xy.labels()[1].name});

  const auto kx = quad_x.kets();
  const auto ky = quad_y.kets();
  const auto wx = quad_x.weights();
  const auto wy = quad_y.weights();

  std::vector<double> px(kx.size());
  std::vector<double> py(ky.size());
  for (std::size_t a = 0; a < kx.size(); ++a) px[a] = single_density(rho_x, kx[a]);
  for (std::size_t b = 0; b < ky.size(); ++b) py[b] = single_density(rho_y, ky[b]);

  const PairDensity joint(rho_xy);
  std::vector<double> rows(kx.size());
  parallel_for(kx.size(), [&](std::size_t a) {
    const Eigen::Matrix2cd x = joint.contract_first(kx[a]);
    CompensatedSum row;
    for (std::size_t b = 0; b < ky.size(); ++b) {
      const double p = PairDensity::form(x, ky[b]);
      row.add(wy[b] * xlog2_ratio(p, px[a] * py[b]));
    }
    rows[a] = wx[a] * row.value();
  });

  CompensatedSum total;
  for (double r : rows) total.add(r);
  return clamp_information(total.value());
}

double averaged_selected_information(const DensityMatrix& rho_xy, const SphereQuadrature& quad_x,
                                     const SphereQuadrature& quad_y) {
  require_two_qubits(rho_xy, "averaged_selected_information");

  // Outcome 0 is the node ket, outcome 1 its antipode.
  auto antipodal_kets = [](const SphereQuadrature& q) {
    std::vector<PureState> out;
    out.reserve(q.size());
    for (const auto& d : q.nodes()) out.push_back(ket_from_bloch(d.antipode()));
    return out;
  };
  const auto kx = quad_x.kets();
  const auto ky = quad_y.kets();
  const auto kx_anti = antipodal_kets(quad_x);
  const auto ky_anti = antipodal_kets(quad_y);

  const PairDensity joint(rho_xy);
  std::vector<double> rows(kx.size());
  parallel_for(kx.size(), [&](std::size_t a) {
    const std::array<Eigen::Matrix2cd, 2> x{joint.contract_first(kx[a]),
                                            joint.contract_first(kx_anti[a])};
    CompensatedSum row;
    for (std::size_t b = 0; b < ky.size(); ++b) {
      const std::array<const PureState*, 2> yk{&ky[b], &ky_anti[b]};
      JointTable::Probs probs{};
      double total = 0.0;
      for (int k = 0; k < 2; ++k) {
        for (int l = 0; l < 2; ++l) {
          probs[k][l] = PairDensity::form(x[k], *yk[l]);
          total += probs[k][l];
        }
      }
      for (auto& r : probs) {
        for (double& v : r) v /= total;
      }
      row.add(quad_y.weights()[b] * mutual_information(JointTable(probs)));
    }
    rows[a] = quad_x.weights()[a] * row.value();
  });

  CompensatedSum total;
  for (double r : rows) total.add(r);
  const double volume = quad_x.total_weight() * quad_y.total_weight();
  return clamp_information(total.value() / volume);
}

}  // namespace cqkd
