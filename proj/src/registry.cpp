#include "orthosim/registry.hpp"

#include <algorithm>
#include <string>

#include "orthosim/error.hpp"

namespace orthosim::quantum {

ParticleId QuantumRegistry::create(const StateVector& single_qubit) {
  if (single_qubit.num_qubits() != 1) throw InvalidSpec("QuantumRegistry::create: expected one qubit");
  const ParticleId id{locations_.size()};
  locations_.push_back({clusters_.size(), 0});
  clusters_.push_back(single_qubit);
  members_.push_back({id});
  return id;
}

std::pair<ParticleId, ParticleId> QuantumRegistry::create_singlet() {
  const ParticleId a{locations_.size()};
  const ParticleId b{locations_.size() + 1};
  const std::size_t cluster = clusters_.size();
  locations_.push_back({cluster, 0});
  locations_.push_back({cluster, 1});
  clusters_.push_back(singlet());
  members_.push_back({a, b});
  return {a, b};
}

const QuantumRegistry::Location& QuantumRegistry::locate(ParticleId particle) const {
  if (particle.value >= locations_.size())
    throw InvalidSpec("QuantumRegistry: unknown particle " + std::to_string(particle.value));
  return locations_[particle.value];
}

std::size_t QuantumRegistry::cluster_qubits(ParticleId particle) const {
  return clusters_[locate(particle).cluster].num_qubits();
}

void QuantumRegistry::apply(ParticleId particle, const Gate& gate) {
  const Location loc = locate(particle);
  clusters_[loc.cluster].apply(gate, loc.qubit);
}

void QuantumRegistry::apply_dense_code(ParticleId particle, DenseBits bits) {
  const Location loc = locate(particle);
  quantum::apply_dense_code(clusters_[loc.cluster], bits, loc.qubit);
}

void QuantumRegistry::merge_into(std::size_t target, std::size_t source) {
  const std::size_t offset = clusters_[target].num_qubits();
  if (offset + clusters_[source].num_qubits() > kMaxQubits)
    throw ResourceLimit("QuantumRegistry: merging clusters would exceed the qubit guard");
  clusters_[target] = clusters_[target].tensor(clusters_[source]);
  for (ParticleId id : members_[source]) {
    locations_[id.value] = {target, offset + locations_[id.value].qubit};
    members_[target].push_back(id);
  }
  members_[source].clear();
  clusters_[source] = StateVector(1);
}

ParticleId QuantumRegistry::attach_probe(ParticleId target, const ProbeAttackSpec& spec) {
  spec.validate();
  const Location loc = locate(target);
  const std::size_t cluster = loc.cluster;
  if (clusters_[cluster].num_qubits() + 1 > kMaxQubits)
    throw ResourceLimit("QuantumRegistry: probe would exceed the qubit guard");
  const ParticleId probe{locations_.size()};
  const std::size_t probe_qubit = clusters_[cluster].num_qubits();
  clusters_[cluster] = clusters_[cluster].tensor(spec.probe_initial);
  locations_.push_back({cluster, probe_qubit});
  members_[cluster].push_back(probe);
  clusters_[cluster].apply_controlled(gates::ry(2.0 * spec.theta), loc.qubit, probe_qubit);
  return probe;
}

int QuantumRegistry::measure(ParticleId particle, MeasurementBasis basis, Rng& rng) {
  const Location loc = locate(particle);
  StateVector& state = clusters_[loc.cluster];
  if (basis == MeasurementBasis::x) state.apply(gates::hadamard(), loc.qubit);
  const int outcome = state.measure(loc.qubit, rng);
  if (basis == MeasurementBasis::x) state.apply(gates::hadamard(), loc.qubit);
  return outcome;
}

BellOutcome QuantumRegistry::bell_measure(ParticleId first, ParticleId second, Rng& rng) {
  if (first == second) throw InvalidSpec("QuantumRegistry::bell_measure: particles coincide");
  if (locate(first).cluster != locate(second).cluster) merge_into(locate(first).cluster, locate(second).cluster);
  const Location a = locate(first);
  const Location b = locate(second);
  BellMeasurement m = quantum::bell_measure(clusters_[a.cluster], a.qubit, b.qubit, rng);
  clusters_[a.cluster] = std::move(m.post);
  return m.outcome;
}

void QuantumRegistry::apply_noise(ParticleId particle, const NoiseChannel& channel, Rng& rng) {
  const double p = channel.probability;
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidSpec("apply_noise: probability must lie in [0,1]");
  if (p == 0.0) return;
  switch (channel.kind) {
    case ChannelKind::bit_flip:
      if (rng.bernoulli(p)) apply(particle, gates::pauli_x());
      break;
    case ChannelKind::depolarizing:
      // With probability p a uniformly random Pauli (identity included).
      if (rng.bernoulli(p)) {
        switch (rng.below(4)) {
          case 1: apply(particle, gates::pauli_x()); break;
          case 2: apply(particle, gates::pauli_y()); break;
          case 3: apply(particle, gates::pauli_z()); break;
          default: break;
        }
      }
      break;
  }
}

DensityMatrix QuantumRegistry::reduced_state(std::span<const ParticleId> particles) const {
  if (particles.empty()) throw InvalidSpec("reduced_state: no particles given");
  // Gather the distinct clusters involved, then build their joint state.
  std::vector<std::size_t> clusters;
  for (ParticleId p : particles) {
    const std::size_t c = locate(p).cluster;
    if (std::find(clusters.begin(), clusters.end(), c) == clusters.end()) clusters.push_back(c);
  }
  StateVector joint = clusters_[clusters.front()];
  std::vector<std::size_t> offsets{0};
  for (std::size_t k = 1; k < clusters.size(); ++k) {
    offsets.push_back(joint.num_qubits());
    joint = joint.tensor(clusters_[clusters[k]]);
  }
  std::vector<std::size_t> keep;
  for (ParticleId p : particles) {
    const Location loc = locate(p);
    const auto k = static_cast<std::size_t>(std::find(clusters.begin(), clusters.end(), loc.cluster) - clusters.begin());
    keep.push_back(offsets[k] + loc.qubit);
  }
  {
    std::vector<std::size_t> sorted = keep;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw InvalidSpec("reduced_state: particle listed twice");
  }
  DensityMatrix reduced = partial_trace(joint.density(), keep);
  // partial_trace orders kept qubits ascending; permute into the caller's order.
  std::vector<std::size_t> rank(keep.size());
  {
    std::vector<std::size_t> sorted = keep;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < keep.size(); ++i)
      rank[i] = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), keep[i]) - sorted.begin());
  }
  const std::size_t k = keep.size();
  const std::size_t dim = std::size_t{1} << k;
  auto remap = [&](std::size_t idx) {
    // idx is in caller order (bit i = particle i); return ascending-order index.
    std::size_t out = 0;
    for (std::size_t i = 0; i < k; ++i)
      if (idx & (std::size_t{1} << i)) out |= std::size_t{1} << rank[i];
    return out;
  };
  Eigen::MatrixXcd ordered(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c)
      ordered(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          reduced.matrix()(static_cast<Eigen::Index>(remap(r)), static_cast<Eigen::Index>(remap(c)));
  return DensityMatrix(k, std::move(ordered));
}

}  // namespace orthosim::quantum
