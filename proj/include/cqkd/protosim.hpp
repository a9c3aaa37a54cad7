#pragma once

// Monte Carlo simulation of the elementary protocol step: Alice measures her
// half of a singlet in a random basis, Eve applies her attack to Bob's half
// and reads her ancilla in the computational basis, Bob measures in an
// independent random basis. Every round draws from its own RNG substream
// keyed by (seed, round index), so a transcript depends only on the config.

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "cqkd/attack.hpp"
#include "cqkd/infocalc.hpp"
#include "cqkd/qstate.hpp"

namespace cqkd {

// Direction sampled in the coordinates that are flat under dV: u = cos(theta)
// in [-1, 1], phi in [0, 2pi). Stored this way so transcripts round-trip
// without trigonometric loss.
struct SampledDirection {
  double u = 1.0;
  double phi = 0.0;

  [[nodiscard]] BlochDirection bloch() const { return BlochDirection::from_cos(u, phi); }
  [[nodiscard]] SampledDirection antipode() const;
  [[nodiscard]] std::array<double, 3> vector() const;

  bool operator==(const SampledDirection&) const = default;
};

// Eve always reads |0>_E / |1>_E.
inline constexpr SampledDirection kComputationalAxis{1.0, 0.0};

// Bit 0 is the outcome on the direction ket, bit 1 the antipodal ket.
struct RoundRecord {
  SampledDirection alice_dir;
  int alice_bit = 0;
  SampledDirection bob_dir;
  int bob_bit = 0;
  int eve_bit = 0;

  bool operator==(const RoundRecord&) const = default;
};

struct ProtocolConfig {
  std::uint64_t rounds = 100000;
  AttackParams attack{0.0, kPi / 4.0};
  std::size_t cells_u = 16;
  std::size_t cells_phi = 32;
  std::uint64_t seed = 1;
  double disclose_fraction = 0.5;

  // PreconditionError on zero rounds, zero cells or a fraction outside (0, 1).
  void validate() const;
};

// SplitMix64 stream; one per round.
class RoundRng {
 public:
  explicit RoundRng(std::uint64_t state) : state_(state) {}
  static RoundRng for_round(std::uint64_t seed, std::uint64_t round);

  std::uint64_t next();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();

 private:
  std::uint64_t state_;
};

// Post-attack pure state of [A, B, E], prepared once per run.
class AttackedState {
 public:
  explicit AttackedState(const AttackParams& p);

  [[nodiscard]] const Eigen::Matrix<Complex, 8, 1>& amplitudes() const { return psi_; }

  // Born probabilities indexed 4 * alice_bit + 2 * bob_bit + eve_bit.
  // Throws NumericalError if they fail to sum to one within 1e-10.
  [[nodiscard]] std::array<double, 8> outcome_probabilities(const SampledDirection& alice,
                                                            const SampledDirection& bob) const;

 private:
  Eigen::Matrix<Complex, 8, 1> psi_;
};

SampledDirection sample_direction(RoundRng& rng);

// One round with both directions drawn uniformly under dV.
RoundRecord run_round(const AttackedState& state, RoundRng& rng);

// One round with the measurement directions fixed by the caller.
RoundRecord measure_round(const AttackedState& state, const SampledDirection& alice,
                          const SampledDirection& bob, RoundRng& rng);

struct TranscriptEntry {
  std::uint64_t round = 0;
  bool disclosed = false;
  RoundRecord record;

  bool operator==(const TranscriptEntry&) const = default;
};

struct Transcript {
  ProtocolConfig config;
  std::vector<TranscriptEntry> entries;
};

// Rounds are generated in parallel; the first floor(disclose_fraction * rounds)
// are marked disclosed.
Transcript run_protocol(const ProtocolConfig& cfg);

// Uniform grid in (cos(theta), phi); every cell has measure 2 / size().
class SiftingPartition {
 public:
  SiftingPartition(std::size_t cells_u, std::size_t cells_phi);

  [[nodiscard]] std::size_t cells_u() const { return cells_u_; }
  [[nodiscard]] std::size_t cells_phi() const { return cells_phi_; }
  [[nodiscard]] std::size_t size() const { return cells_u_ * cells_phi_; }
  [[nodiscard]] double cell_measure() const { return 2.0 / static_cast<double>(size()); }
  [[nodiscard]] std::size_t cell_of(const SampledDirection& d) const;

  // Probability that two independent uniform directions are kept by sift():
  // same cell, or the second's antipode in the first's cell.
  [[nodiscard]] double acceptance_probability() const;

 private:
  std::size_t cells_u_;
  std::size_t cells_phi_;
};

struct SiftedRound {
  TranscriptEntry entry;
  bool antipodal = false;
  int bob_bit_aligned = 0;  // flipped when matched through the antipodal cell
};

std::vector<SiftedRound> sift(std::span<const TranscriptEntry> entries,
                              const SiftingPartition& partition);

// Fraction of sifted rounds breaking the singlet anticorrelation, i.e. with
// alice_bit == bob_bit_aligned.
double sifted_error_rate(std::span<const SiftedRound> sifted);

struct Observation {
  SampledDirection dir;
  int bit = 0;
};

struct ObservationPair {
  Observation x;
  Observation y;
};

std::vector<ObservationPair> alice_bob_pairs(std::span<const TranscriptEntry> entries);
std::vector<ObservationPair> alice_eve_pairs(std::span<const TranscriptEntry> entries);
std::vector<ObservationPair> bob_eve_pairs(std::span<const TranscriptEntry> entries);
std::vector<ObservationPair> sifted_bit_pairs(std::span<const SiftedRound> sifted);

struct MiEstimate {
  double bits = 0.0;          // reported value, never negative
  double plug_in_bits = 0.0;  // uncorrected
  bool miller_madow = false;
  std::size_t samples = 0;
};

// Plug-in mutual information of the histogram over (cell_x, bit_x) x
// (cell_y, bit_y), optionally with the Miller-Madow correction.
MiEstimate empirical_mi(std::span<const ObservationPair> pairs, const SiftingPartition& binning_x,
                        const SiftingPartition& binning_y, bool miller_madow = true);

// Linear-inversion reconstruction of the two-qubit state from random-basis
// outcomes (a = 3<s n>, b = 3<s m>, T = 9<s s' n m^T>), projected onto the
// positive cone and renormalized. Labels [x_label, y_label].
DensityMatrix tomographic_state(std::span<const ObservationPair> pairs,
                                std::string_view x_label = "A", std::string_view y_label = "B");

// Non-selected information of tomographic_state(pairs).
double tomographic_mi(std::span<const ObservationPair> pairs, const SphereQuadrature& quad);

// Delimited transcript export, one round per line:
// round,disclosed,alice_u,alice_phi,alice_bit,bob_u,bob_phi,bob_bit,eve_bit
void write_transcript_csv(std::ostream& out, std::span<const TranscriptEntry> entries);
std::vector<TranscriptEntry> read_transcript_csv(std::istream& in);

}  // namespace cqkd
