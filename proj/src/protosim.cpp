#include "cqkd/protosim.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "cqkd/error.hpp"
#include "cqkd/format.hpp"
#include "cqkd/parallel.hpp"

namespace cqkd {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr double kBornSumTol = 1e-10;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double wrap_phi(double phi) {
  double w = std::fmod(phi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

Eigen::Vector2cd ket_vector(const SampledDirection& d) {
  const PureState k = ket_from_bloch(d.bloch());
  return Eigen::Vector2cd(k[0], k[1]);
}

int draw_outcome(std::span<const double> probs, double r) {
  double cumulative = 0.0;
  int last_nonzero = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last_nonzero = static_cast<int>(i);
    cumulative += probs[i];
    if (r < cumulative) return static_cast<int>(i);
  }
  return last_nonzero;
}

// Entropy in bits of a histogram, summed in ascending count order.
double histogram_entropy(std::vector<std::uint64_t> counts, std::uint64_t n) {
  std::sort(counts.begin(), counts.end());
  CompensatedSum s;
  const double total = static_cast<double>(n);
  for (std::uint64_t c : counts) {
    const double p = static_cast<double>(c) / total;
    s.add(-p * std::log2(p));
  }
  return s.value();
}

template <typename Key>
std::vector<std::uint64_t> counts_of(const std::vector<Key>& keys) {
  std::unordered_map<Key, std::uint64_t> m;
  for (const Key& k : keys) ++m[k];
  std::vector<std::uint64_t> out;
  out.reserve(m.size());
  for (const auto& [k, c] : m) out.push_back(c);
  return out;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

int parse_bit(std::string_view s) {
  const int b = parse_integer<int>(s);
  if (b != 0 && b != 1) throw IoError("expected a bit, got '" + std::string(s) + "'");
  return b;
}

constexpr std::string_view kTranscriptHeader =
    "round,disclosed,alice_u,alice_phi,alice_bit,bob_u,bob_phi,bob_bit,eve_bit";

}  // namespace

// ---------------------------------------------------------------------------

SampledDirection SampledDirection::antipode() const { return {-u, wrap_phi(phi + kPi)}; }

std::array<double, 3> SampledDirection::vector() const {
  const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
  return {s * std::cos(phi), s * std::sin(phi), u};
}

void ProtocolConfig::validate() const {
  if (rounds == 0) throw PreconditionError("ProtocolConfig: rounds must be >= 1");
  if (cells_u == 0 || cells_phi == 0) throw PreconditionError("ProtocolConfig: cell counts must be >= 1");
  if (!(disclose_fraction > 0.0 && disclose_fraction < 1.0)) {
    throw PreconditionError("ProtocolConfig: disclose_fraction must lie in (0, 1)");
  }
  if (!std::isfinite(attack.theta) || !std::isfinite(attack.phi)) {
    throw PreconditionError("ProtocolConfig: attack angles must be finite");
  }
}

RoundRng RoundRng::for_round(std::uint64_t seed, std::uint64_t round) {
  return RoundRng(mix64(seed) ^ mix64(round * kGolden + 0xD1B54A32D192ED03ULL));
}

std::uint64_t RoundRng::next() {
  state_ += kGolden;
  return mix64(state_);
}

double RoundRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

// ---------------------------------------------------------------------------

AttackedState::AttackedState(const AttackParams& p) {
  const EveIsometry iso(p);
  // Singlet (|01> - |10>)/sqrt(2) on A, B; Eve's ancilla in |0>.
  psi_.setZero();
  const double amp = 1.0 / std::numbers::sqrt2;
  const std::array<std::pair<int, double>, 2> terms{{{0, amp}, {1, -amp}}};  // (alice bit, coefficient)
  for (const auto& [a, c] : terms) {
    const int b = 1 - a;
    for (int b_out = 0; b_out < 2; ++b_out) {
      for (int e = 0; e < 2; ++e) psi_(4 * a + 2 * b_out + e) += c * iso.phi_state(b, b_out)[e];
    }
  }
}

std::array<double, 8> AttackedState::outcome_probabilities(const SampledDirection& alice,
                                                           const SampledDirection& bob) const {
  const std::array<Eigen::Vector2cd, 2> ka{ket_vector(alice), ket_vector(alice.antipode())};
  const std::array<Eigen::Vector2cd, 2> kb{ket_vector(bob), ket_vector(bob.antipode())};
  std::array<double, 8> probs{};
  double total = 0.0;
  for (int x = 0; x < 2; ++x) {
    // chi(j, e) = sum_i conj(ka_i) psi(i, j, e)
    Eigen::Matrix2cd chi = Eigen::Matrix2cd::Zero();
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        for (int e = 0; e < 2; ++e) chi(j, e) += std::conj(ka[x](i)) * psi_(4 * i + 2 * j + e);
      }
    }
    for (int y = 0; y < 2; ++y) {
      const Eigen::RowVector2cd amp = kb[y].adjoint() * chi;
      for (int e = 0; e < 2; ++e) {
        const double p = std::norm(amp(e));
        probs[4 * x + 2 * y + e] = p;
        total += p;
      }
    }
  }
  if (std::abs(total - 1.0) > kBornSumTol) {
    throw NumericalError("Born probabilities sum to " + std::to_string(total));
  }
  return probs;
}

SampledDirection sample_direction(RoundRng& rng) {
  const double u = 2.0 * rng.uniform() - 1.0;
  const double phi = kTwoPi * rng.uniform();
  return {u, phi};
}

RoundRecord measure_round(const AttackedState& state, const SampledDirection& alice,
                          const SampledDirection& bob, RoundRng& rng) {
  const auto probs = state.outcome_probabilities(alice, bob);
  const int k = draw_outcome(probs, rng.uniform());
  return RoundRecord{alice, k / 4, bob, (k / 2) % 2, k % 2};
}

RoundRecord run_round(const AttackedState& state, RoundRng& rng) {
  const SampledDirection alice = sample_direction(rng);
  const SampledDirection bob = sample_direction(rng);
  return measure_round(state, alice, bob, rng);
}

Transcript run_protocol(const ProtocolConfig& cfg) {
  cfg.validate();
  const AttackedState state(cfg.attack);
  Transcript t{cfg, std::vector<TranscriptEntry>(cfg.rounds)};
  const auto disclosed =
      static_cast<std::uint64_t>(std::floor(cfg.disclose_fraction * static_cast<double>(cfg.rounds)));
  parallel_for(cfg.rounds, [&](std::size_t i) {
    RoundRng rng = RoundRng::for_round(cfg.seed, i);
    t.entries[i] = TranscriptEntry{i, i < disclosed, run_round(state, rng)};
  });
  return t;
}

// ---------------------------------------------------------------------------

SiftingPartition::SiftingPartition(std::size_t cells_u, std::size_t cells_phi)
    : cells_u_(cells_u), cells_phi_(cells_phi) {
  if (cells_u == 0 || cells_phi == 0) throw PreconditionError("SiftingPartition: empty partition");
}

std::size_t SiftingPartition::cell_of(const SampledDirection& d) const {
  const auto nu = static_cast<double>(cells_u_);
  const auto nphi = static_cast<double>(cells_phi_);
  const auto i = static_cast<std::size_t>(std::clamp(std::floor((d.u + 1.0) * 0.5 * nu), 0.0, nu - 1.0));
  const auto j = static_cast<std::size_t>(
      std::clamp(std::floor(wrap_phi(d.phi) / kTwoPi * nphi), 0.0, nphi - 1.0));
  return i * cells_phi_ + j;
}

double SiftingPartition::acceptance_probability() const {
  const auto k = static_cast<double>(size());
  // With a single azimuthal sector and an odd band count the middle band is
  // its own antipode, so the two matching events overlap there.
  const bool self_antipodal = cells_phi_ == 1 && cells_u_ % 2 == 1;
  return 2.0 / k - (self_antipodal ? 1.0 / (k * k) : 0.0);
}

std::vector<SiftedRound> sift(std::span<const TranscriptEntry> entries,
                              const SiftingPartition& partition) {
  std::vector<SiftedRound> out;
  for (const auto& e : entries) {
    const std::size_t ca = partition.cell_of(e.record.alice_dir);
    if (ca == partition.cell_of(e.record.bob_dir)) {
      out.push_back(SiftedRound{e, false, e.record.bob_bit});
    } else if (ca == partition.cell_of(e.record.bob_dir.antipode())) {
      out.push_back(SiftedRound{e, true, 1 - e.record.bob_bit});
    }
  }
  return out;
}

double sifted_error_rate(std::span<const SiftedRound> sifted) {
  if (sifted.empty()) throw PreconditionError("sifted_error_rate: no sifted rounds");
  std::size_t errors = 0;
  for (const auto& s : sifted) {
    if (s.entry.record.alice_bit == s.bob_bit_aligned) ++errors;
  }
  return static_cast<double>(errors) / static_cast<double>(sifted.size());
}

// ---------------------------------------------------------------------------

std::vector<ObservationPair> alice_bob_pairs(std::span<const TranscriptEntry> entries) {
  std::vector<ObservationPair> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    out.push_back({{e.record.alice_dir, e.record.alice_bit}, {e.record.bob_dir, e.record.bob_bit}});
  }
  return out;
}

std::vector<ObservationPair> alice_eve_pairs(std::span<const TranscriptEntry> entries) {
  std::vector<ObservationPair> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    out.push_back({{e.record.alice_dir, e.record.alice_bit}, {kComputationalAxis, e.record.eve_bit}});
  }
  return out;
}

std::vector<ObservationPair> bob_eve_pairs(std::span<const TranscriptEntry> entries) {
  std::vector<ObservationPair> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    out.push_back({{e.record.bob_dir, e.record.bob_bit}, {kComputationalAxis, e.record.eve_bit}});
  }
  return out;
}

std::vector<ObservationPair> sifted_bit_pairs(std::span<const SiftedRound> sifted) {
  std::vector<ObservationPair> out;
  out.reserve(sifted.size());
  for (const auto& s : sifted) {
    out.push_back({{s.entry.record.alice_dir, s.entry.record.alice_bit},
                   {s.entry.record.bob_dir, s.bob_bit_aligned}});
  }
  return out;
}

MiEstimate empirical_mi(std::span<const ObservationPair> pairs, const SiftingPartition& binning_x,
                        const SiftingPartition& binning_y, bool miller_madow) {
  if (pairs.empty()) throw PreconditionError("empirical_mi: no observations");
  const std::uint64_t n = pairs.size();
  const std::uint64_t symbols_y = 2 * binning_y.size();
  std::vector<std::uint64_t> xs(n);
  std::vector<std::uint64_t> ys(n);
  std::vector<std::uint64_t> xys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = 2 * binning_x.cell_of(pairs[i].x.dir) + static_cast<std::uint64_t>(pairs[i].x.bit);
    ys[i] = 2 * binning_y.cell_of(pairs[i].y.dir) + static_cast<std::uint64_t>(pairs[i].y.bit);
    xys[i] = xs[i] * symbols_y + ys[i];
  }
  const auto cx = counts_of(xs);
  const auto cy = counts_of(ys);
  const auto cxy = counts_of(xys);
  const double hx = histogram_entropy(cx, n);
  const double hy = histogram_entropy(cy, n);
  const double hxy = histogram_entropy(cxy, n);

  MiEstimate est;
  est.samples = n;
  est.miller_madow = miller_madow;
  est.plug_in_bits = hx + hy - hxy;
  double bits = est.plug_in_bits;
  if (miller_madow) {
    const double scale = 1.0 / (2.0 * static_cast<double>(n) * std::numbers::ln2);
    const auto bins = [](const std::vector<std::uint64_t>& c) { return static_cast<double>(c.size()); };
    bits += scale * ((bins(cx) - 1.0) + (bins(cy) - 1.0) - (bins(cxy) - 1.0));
  }
  est.bits = std::max(0.0, bits);
  return est;
}

DensityMatrix tomographic_state(std::span<const ObservationPair> pairs, std::string_view x_label,
                                std::string_view y_label) {
  if (pairs.empty()) throw PreconditionError("tomographic_state: no observations");
  std::array<CompensatedSum, 3> a_sum;
  std::array<CompensatedSum, 3> b_sum;
  std::array<std::array<CompensatedSum, 3>, 3> t_sum;
  for (const auto& p : pairs) {
    const double sx = p.x.bit == 0 ? 1.0 : -1.0;
    const double sy = p.y.bit == 0 ? 1.0 : -1.0;
    const auto nx = p.x.dir.vector();
    const auto ny = p.y.dir.vector();
    for (int i = 0; i < 3; ++i) {
      a_sum[i].add(sx * nx[i]);
      b_sum[i].add(sy * ny[i]);
      for (int j = 0; j < 3; ++j) t_sum[i][j].add(sx * sy * nx[i] * ny[j]);
    }
  }
  const auto n = static_cast<double>(pairs.size());

  const std::array<Eigen::Matrix2cd, 3> pauli{
      (Eigen::Matrix2cd() << 0, 1, 1, 0).finished(),
      (Eigen::Matrix2cd() << 0, Complex(0, -1), Complex(0, 1), 0).finished(),
      (Eigen::Matrix2cd() << 1, 0, 0, -1).finished()};
  auto kron = [](const Eigen::Matrix2cd& x, const Eigen::Matrix2cd& y) {
    Eigen::Matrix4cd out;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = x(i, j) * y;
    }
    return out;
  };
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Identity();
  for (int i = 0; i < 3; ++i) {
    rho += 3.0 * a_sum[i].value() / n * kron(pauli[i], id);
    rho += 3.0 * b_sum[i].value() / n * kron(id, pauli[i]);
    for (int j = 0; j < 3; ++j) rho += 9.0 * t_sum[i][j].value() / n * kron(pauli[i], pauli[j]);
  }
  rho /= 4.0;

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho);
  const Eigen::Vector4d clipped = es.eigenvalues().cwiseMax(0.0);
  Eigen::Matrix4cd psd = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
  psd /= psd.trace().real();
  return DensityMatrix(Matrix(psd), qubits({x_label, y_label}));
}

double tomographic_mi(std::span<const ObservationPair> pairs, const SphereQuadrature& quad) {
  return nonselected_information(tomographic_state(pairs), quad, quad);
}

// ---------------------------------------------------------------------------

void write_transcript_csv(std::ostream& out, std::span<const TranscriptEntry> entries) {
  out << kTranscriptHeader << '\n';
  for (const auto& e : entries) {
    const RoundRecord& r = e.record;
    out << e.round << ',' << (e.disclosed ? 1 : 0) << ',' << format_double(r.alice_dir.u) << ','
        << format_double(r.alice_dir.phi) << ',' << r.alice_bit << ',' << format_double(r.bob_dir.u)
        << ',' << format_double(r.bob_dir.phi) << ',' << r.bob_bit << ',' << r.eve_bit << '\n';
  }
}

std::vector<TranscriptEntry> read_transcript_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTranscriptHeader) {
    throw IoError("transcript: missing or unexpected header");
  }
  std::vector<TranscriptEntry> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 9) throw IoError("transcript: expected 9 fields, got " + std::to_string(f.size()));
    TranscriptEntry e;
    e.round = parse_integer<std::uint64_t>(f[0]);
    e.disclosed = parse_bit(f[1]) == 1;
    e.record.alice_dir = {parse_double(f[2]), parse_double(f[3])};
    e.record.alice_bit = parse_bit(f[4]);
    e.record.bob_dir = {parse_double(f[5]), parse_double(f[6])};
    e.record.bob_bit = parse_bit(f[7]);
    e.record.eve_bit = parse_bit(f[8]);
    out.push_back(e);
  }
  return out;
}

}  // namespace cqkd
