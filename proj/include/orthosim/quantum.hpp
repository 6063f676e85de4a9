#pragma once

// Exact small-register quantum simulation. Qubit 0 is the least significant
// bit of the amplitude index throughout.

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "orthosim/random.hpp"

namespace orthosim::quantum {

using Complex = std::complex<double>;
using Gate = Eigen::Matrix2cd;

inline constexpr std::size_t kMaxQubits = 14;
inline constexpr double kStateTolerance = 1e-10;

namespace gates {
Gate identity();
Gate pauli_x();
Gate pauli_y();
Gate pauli_z();
Gate hadamard();
/// exp(-i angle Y / 2).
Gate ry(double angle);
}  // namespace gates

class DensityMatrix;

class StateVector {
 public:
  /// |0...0> on `num_qubits` qubits.
  explicit StateVector(std::size_t num_qubits);
  /// Rejects lengths other than 2^n and norms off 1 by more than 1e-10.
  StateVector(std::size_t num_qubits, std::vector<Complex> amplitudes);

  static StateVector basis(std::size_t num_qubits, std::size_t index);

  std::size_t num_qubits() const { return num_qubits_; }
  std::size_t dimension() const { return amplitudes_.size(); }
  std::span<const Complex> amplitudes() const { return amplitudes_; }
  Complex amplitude(std::size_t index) const { return amplitudes_.at(index); }
  double norm_squared() const;

  void apply(const Gate& gate, std::size_t qubit);
  void apply_controlled(const Gate& gate, std::size_t control, std::size_t target);
  /// CNOT followed by H on `first`: maps the Bell basis of (first, second) to
  /// computational states, outcome index = m_first + 2 m_second.
  void bell_to_computational(std::size_t first, std::size_t second);
  void computational_to_bell(std::size_t first, std::size_t second);

  /// This register occupies the low qubits of the result, `high` the rest.
  StateVector tensor(const StateVector& high) const;

  /// Z-basis projective measurement with collapse; returns the outcome bit.
  int measure(std::size_t qubit, Rng& rng);
  double probability_of_one(std::size_t qubit) const;

  DensityMatrix density() const;

  /// |<this|other>|^2.
  double fidelity(const StateVector& other) const;

 private:
  void check_qubit(std::size_t qubit) const;
  void renormalize();

  std::size_t num_qubits_;
  std::vector<Complex> amplitudes_;
};

class DensityMatrix {
 public:
  /// Checks Hermiticity, unit trace and eigenvalues >= -1e-10.
  DensityMatrix(std::size_t num_qubits, Eigen::MatrixXcd matrix);

  static DensityMatrix maximally_mixed(std::size_t num_qubits);

  std::size_t num_qubits() const { return num_qubits_; }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  double purity() const;
  /// Largest entrywise deviation.
  double distance(const DensityMatrix& other) const;

 private:
  std::size_t num_qubits_;
  Eigen::MatrixXcd matrix_;
};

StateVector singlet();

enum class BellOutcome : std::uint8_t { phi_plus = 0, phi_minus = 1, psi_plus = 2, psi_minus = 3 };

const char* to_string(BellOutcome outcome);

/// Bell state on qubits (0, 1): Phi = (|00> +- |11>)/sqrt2, Psi = (|01> +- |10>)/sqrt2.
StateVector bell_state(BellOutcome which);

/// Two classical bits carried by one dense-coded pair. `first` selects Z,
/// `second` selects X; the pair 00/01/10/11 applies I/X/Z/XZ.
struct DenseBits {
  bool first = false;
  bool second = false;

  std::uint8_t code() const { return static_cast<std::uint8_t>((first ? 2 : 0) | (second ? 1 : 0)); }
  static DenseBits from_code(std::uint8_t code) { return {(code & 2) != 0, (code & 1) != 0}; }
  friend bool operator==(const DenseBits&, const DenseBits&) = default;
};

/// Applies the dense-coding Pauli for `bits` to qubit `which` in place.
void apply_dense_code(StateVector& state, DenseBits bits, std::size_t which);

/// Dense-codes two bits onto qubit `which` of a two-qubit pair.
StateVector dense_encode(DenseBits bits, const StateVector& pair, std::size_t which);

/// Bell outcome produced by dense-coding `bits` onto a singlet.
BellOutcome singlet_encoding(DenseBits bits);
/// Inverse of singlet_encoding.
DenseBits singlet_decoding(BellOutcome outcome);

struct BellMeasurement {
  BellOutcome outcome;
  StateVector post;
};

/// Born probabilities of the four Bell outcomes on qubits (i, j).
std::array<double, 4> bell_probabilities(const StateVector& state, std::size_t i, std::size_t j);

/// Projects qubits (i, j) onto a sampled Bell state and renormalizes.
BellMeasurement bell_measure(const StateVector& state, std::size_t i, std::size_t j, Rng& rng);

/// Reduced state on `keep` (listed qubits become qubits 0..k-1 in ascending order).
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep);

/// Von Neumann entropy in bits. Eigenvalues in [-1e-10, 0) are clipped to 0.
double von_neumann_entropy(const DensityMatrix& rho);

struct EnsembleMember {
  double probability;
  DensityMatrix state;
};

/// S(sum p_i rho_i) - sum p_i S(rho_i).
double holevo_information(std::span<const EnsembleMember> ensemble);

/// Eve's per-particle interaction: controlled-R_y(2 theta) from the system
/// qubit onto a one-qubit probe. theta = 0 is the identity, pi/2 a CNOT.
struct ProbeAttackSpec {
  double theta = 0.0;
  StateVector probe_initial = StateVector(1);

  /// Rejects theta outside [0, pi/2] and multi-qubit probes.
  void validate() const;
  /// 4x4 unitary on (system, probe), system = qubit 0.
  Eigen::Matrix4cd unitary() const;
};

/// Appends the probe as the highest qubit and applies U(theta) with `target`
/// as control.
StateVector probe_interact(const StateVector& system, const ProbeAttackSpec& spec, std::size_t target = 0);

enum class ChannelKind { depolarizing, bit_flip };

struct NoiseChannel {
  ChannelKind kind = ChannelKind::depolarizing;
  double probability = 0.0;
};

/// Kraus action on one qubit. Depolarizing p maps rho to
/// (1 - 3p/4) rho + p/4 (X rho X + Y rho Y + Z rho Z); bit flip p to
/// (1 - p) rho + p X rho X.
DensityMatrix apply_channel(const DensityMatrix& rho, const NoiseChannel& channel, std::size_t qubit);

/// Embeds a single-qubit operator acting on `qubit` of an n-qubit register.
Eigen::MatrixXcd embed_operator(const Gate& op, std::size_t qubit, std::size_t num_qubits);

}  // namespace orthosim::quantum
