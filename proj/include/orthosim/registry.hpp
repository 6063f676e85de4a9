#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "orthosim/quantum.hpp"

namespace orthosim::quantum {

/// Handle to one physical qubit held by a QuantumRegistry.
struct ParticleId {
  std::size_t value = 0;
  friend bool operator==(const ParticleId&, const ParticleId&) = default;
  friend auto operator<=>(const ParticleId&, const ParticleId&) = default;
};

enum class MeasurementBasis { z, x };

/// Shared store for every qubit in a protocol run.
///
/// Qubits live in clusters, each an exact StateVector. Independent singlets
/// stay in separate clusters, so a block of thousands of pairs costs only a
/// few amplitudes per pair. Operations that couple two clusters merge them,
/// subject to the kMaxQubits guard.
class QuantumRegistry {
 public:
  ParticleId create(const StateVector& single_qubit);
  /// Returns the two halves of a fresh singlet (qubit 0, qubit 1 of singlet()).
  std::pair<ParticleId, ParticleId> create_singlet();

  void apply(ParticleId particle, const Gate& gate);
  void apply_dense_code(ParticleId particle, DenseBits bits);

  /// Appends a probe qubit to the particle's cluster and applies U(theta).
  ParticleId attach_probe(ParticleId target, const ProbeAttackSpec& spec);

  /// Projective measurement with collapse; the particle is left in the
  /// measured eigenstate. Returns the outcome bit.
  int measure(ParticleId particle, MeasurementBasis basis, Rng& rng);

  BellOutcome bell_measure(ParticleId first, ParticleId second, Rng& rng);

  /// Samples one Pauli trajectory of the channel.
  void apply_noise(ParticleId particle, const NoiseChannel& channel, Rng& rng);

  /// Exact reduced state of the listed particles, in the listed order.
  DensityMatrix reduced_state(std::span<const ParticleId> particles) const;

  std::size_t size() const { return locations_.size(); }
  std::size_t cluster_qubits(ParticleId particle) const;

 private:
  struct Location {
    std::size_t cluster;
    std::size_t qubit;
  };

  const Location& locate(ParticleId particle) const;
  void merge_into(std::size_t target, std::size_t source);

  std::vector<Location> locations_;
  std::vector<StateVector> clusters_;
  std::vector<std::vector<ParticleId>> members_;
};

}  // namespace orthosim::quantum
