#include "orthosim/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "orthosim/error.hpp"

namespace orthosim::quantum {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

std::size_t checked_dimension(std::size_t num_qubits) {
  if (num_qubits == 0) throw InvalidSpec("quantum register needs at least one qubit");
  if (num_qubits > kMaxQubits)
    throw ResourceLimit("quantum register of " + std::to_string(num_qubits) + " qubits exceeds the " +
                        std::to_string(kMaxQubits) + "-qubit guard");
  return std::size_t{1} << num_qubits;
}

double log2_entropy_term(double lambda) { return lambda > 0.0 ? -lambda * std::log2(lambda) : 0.0; }

}  // namespace

namespace gates {
Gate identity() { return Gate::Identity(); }
Gate pauli_x() {
  Gate g;
  g << 0, 1, 1, 0;
  return g;
}
Gate pauli_y() {
  Gate g;
  g << 0, Complex(0, -1), Complex(0, 1), 0;
  return g;
}
Gate pauli_z() {
  Gate g;
  g << 1, 0, 0, -1;
  return g;
}
Gate hadamard() {
  Gate g;
  g << kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2;
  return g;
}
Gate ry(double angle) {
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  Gate g;
  g << c, -s, s, c;
  return g;
}
}  // namespace gates

// ---------------------------------------------------------------- StateVector

StateVector::StateVector(std::size_t num_qubits)
    : num_qubits_(num_qubits), amplitudes_(checked_dimension(num_qubits), Complex(0.0)) {
  amplitudes_[0] = 1.0;
}

StateVector::StateVector(std::size_t num_qubits, std::vector<Complex> amplitudes)
    : num_qubits_(num_qubits), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != checked_dimension(num_qubits))
    throw InvalidSpec("StateVector: amplitude count must be 2^n");
  if (std::abs(norm_squared() - 1.0) > kStateTolerance) throw InvalidSpec("StateVector: state is not normalized");
}

StateVector StateVector::basis(std::size_t num_qubits, std::size_t index) {
  StateVector s(num_qubits);
  if (index >= s.dimension()) throw InvalidSpec("StateVector::basis: index out of range");
  s.amplitudes_[0] = 0.0;
  s.amplitudes_[index] = 1.0;
  return s;
}

double StateVector::norm_squared() const {
  double total = 0.0;
  for (const auto& a : amplitudes_) total += std::norm(a);
  return total;
}

void StateVector::check_qubit(std::size_t qubit) const {
  if (qubit >= num_qubits_) throw InvalidSpec("qubit index " + std::to_string(qubit) + " out of range");
}

void StateVector::apply(const Gate& gate, std::size_t qubit) {
  check_qubit(qubit);
  const std::size_t bit = std::size_t{1} << qubit;
  for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
    if (i & bit) continue;
    const Complex a0 = amplitudes_[i];
    const Complex a1 = amplitudes_[i | bit];
    amplitudes_[i] = gate(0, 0) * a0 + gate(0, 1) * a1;
    amplitudes_[i | bit] = gate(1, 0) * a0 + gate(1, 1) * a1;
  }
}

void StateVector::apply_controlled(const Gate& gate, std::size_t control, std::size_t target) {
  check_qubit(control);
  check_qubit(target);
  if (control == target) throw InvalidSpec("apply_controlled: control equals target");
  const std::size_t cbit = std::size_t{1} << control;
  const std::size_t tbit = std::size_t{1} << target;
  for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
    if (!(i & cbit) || (i & tbit)) continue;
    const Complex a0 = amplitudes_[i];
    const Complex a1 = amplitudes_[i | tbit];
    amplitudes_[i] = gate(0, 0) * a0 + gate(0, 1) * a1;
    amplitudes_[i | tbit] = gate(1, 0) * a0 + gate(1, 1) * a1;
  }
}

void StateVector::bell_to_computational(std::size_t first, std::size_t second) {
  apply_controlled(gates::pauli_x(), first, second);
  apply(gates::hadamard(), first);
}

void StateVector::computational_to_bell(std::size_t first, std::size_t second) {
  apply(gates::hadamard(), first);
  apply_controlled(gates::pauli_x(), first, second);
}

StateVector StateVector::tensor(const StateVector& high) const {
  const std::size_t n = num_qubits_ + high.num_qubits_;
  std::vector<Complex> out(checked_dimension(n));
  for (std::size_t h = 0; h < high.dimension(); ++h)
    for (std::size_t l = 0; l < dimension(); ++l) out[(h << num_qubits_) | l] = high.amplitudes_[h] * amplitudes_[l];
  StateVector result(n);
  result.amplitudes_ = std::move(out);
  return result;
}

double StateVector::probability_of_one(std::size_t qubit) const {
  check_qubit(qubit);
  const std::size_t bit = std::size_t{1} << qubit;
  double p = 0.0;
  for (std::size_t i = 0; i < amplitudes_.size(); ++i)
    if (i & bit) p += std::norm(amplitudes_[i]);
  return p;
}

int StateVector::measure(std::size_t qubit, Rng& rng) {
  const double p1 = probability_of_one(qubit);
  const int outcome = rng.uniform() < p1 ? 1 : 0;
  const std::size_t bit = std::size_t{1} << qubit;
  for (std::size_t i = 0; i < amplitudes_.size(); ++i)
    if (((i & bit) != 0) != (outcome == 1)) amplitudes_[i] = 0.0;
  renormalize();
  return outcome;
}

void StateVector::renormalize() {
  const double norm = std::sqrt(norm_squared());
  if (norm == 0.0) throw InvalidSpec("StateVector: projection onto a zero-probability outcome");
  for (auto& a : amplitudes_) a /= norm;
}

DensityMatrix StateVector::density() const {
  Eigen::Map<const Eigen::VectorXcd> v(amplitudes_.data(), static_cast<Eigen::Index>(amplitudes_.size()));
  return DensityMatrix(num_qubits_, v * v.adjoint());
}

double StateVector::fidelity(const StateVector& other) const {
  if (other.dimension() != dimension()) throw InvalidSpec("fidelity: dimension mismatch");
  Complex overlap = 0.0;
  for (std::size_t i = 0; i < amplitudes_.size(); ++i) overlap += std::conj(amplitudes_[i]) * other.amplitudes_[i];
  return std::norm(overlap);
}

// -------------------------------------------------------------- DensityMatrix

DensityMatrix::DensityMatrix(std::size_t num_qubits, Eigen::MatrixXcd matrix)
    : num_qubits_(num_qubits), matrix_(std::move(matrix)) {
  const auto dim = static_cast<Eigen::Index>(checked_dimension(num_qubits));
  if (matrix_.rows() != dim || matrix_.cols() != dim) throw InvalidSpec("DensityMatrix: matrix must be 2^n x 2^n");
  if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > kStateTolerance)
    throw InvalidSpec("DensityMatrix: matrix is not Hermitian");
  if (std::abs(matrix_.trace() - Complex(1.0)) > kStateTolerance)
    throw InvalidSpec("DensityMatrix: trace differs from 1");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(matrix_, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -kStateTolerance)
    throw InvalidSpec("DensityMatrix: matrix is not positive semidefinite");
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t num_qubits) {
  const auto dim = static_cast<Eigen::Index>(checked_dimension(num_qubits));
  return DensityMatrix(num_qubits, Eigen::MatrixXcd::Identity(dim, dim) / static_cast<double>(dim));
}

double DensityMatrix::purity() const { return (matrix_ * matrix_).trace().real(); }

double DensityMatrix::distance(const DensityMatrix& other) const {
  if (other.matrix_.rows() != matrix_.rows()) throw InvalidSpec("DensityMatrix::distance: dimension mismatch");
  return (matrix_ - other.matrix_).cwiseAbs().maxCoeff();
}

// ------------------------------------------------------- Bell & dense coding

StateVector singlet() { return StateVector(2, {0.0, kInvSqrt2, -kInvSqrt2, 0.0}); }

const char* to_string(BellOutcome outcome) {
  switch (outcome) {
    case BellOutcome::phi_plus: return "phi+";
    case BellOutcome::phi_minus: return "phi-";
    case BellOutcome::psi_plus: return "psi+";
    case BellOutcome::psi_minus: return "psi-";
  }
  return "?";
}

StateVector bell_state(BellOutcome which) {
  // Kets read |q1 q0>, so psi- coincides with singlet() exactly.
  switch (which) {
    case BellOutcome::phi_plus: return StateVector(2, {kInvSqrt2, 0.0, 0.0, kInvSqrt2});
    case BellOutcome::phi_minus: return StateVector(2, {kInvSqrt2, 0.0, 0.0, -kInvSqrt2});
    case BellOutcome::psi_plus: return StateVector(2, {0.0, kInvSqrt2, kInvSqrt2, 0.0});
    case BellOutcome::psi_minus: return singlet();
  }
  throw InvalidSpec("bell_state: unknown outcome");
}

void apply_dense_code(StateVector& state, DenseBits bits, std::size_t which) {
  if (bits.first) state.apply(gates::pauli_z(), which);
  if (bits.second) state.apply(gates::pauli_x(), which);
}

StateVector dense_encode(DenseBits bits, const StateVector& pair, std::size_t which) {
  if (pair.num_qubits() != 2) throw InvalidSpec("dense_encode: expected a two-qubit pair");
  if (which > 1) throw InvalidSpec("dense_encode: qubit index must be 0 or 1");
  StateVector out = pair;
  apply_dense_code(out, bits, which);
  return out;
}

BellOutcome singlet_encoding(DenseBits bits) {
  static constexpr BellOutcome table[4] = {BellOutcome::psi_minus, BellOutcome::phi_minus, BellOutcome::psi_plus,
                                           BellOutcome::phi_plus};
  return table[bits.code()];
}

DenseBits singlet_decoding(BellOutcome outcome) {
  switch (outcome) {
    case BellOutcome::psi_minus: return {false, false};
    case BellOutcome::phi_minus: return {false, true};
    case BellOutcome::psi_plus: return {true, false};
    case BellOutcome::phi_plus: return {true, true};
  }
  throw InvalidSpec("singlet_decoding: unknown outcome");
}

std::array<double, 4> bell_probabilities(const StateVector& state, std::size_t i, std::size_t j) {
  if (i == j) throw InvalidSpec("bell_probabilities: qubit indices coincide");
  StateVector rotated = state;
  rotated.bell_to_computational(i, j);
  const std::size_t bi = std::size_t{1} << i;
  const std::size_t bj = std::size_t{1} << j;
  std::array<double, 4> probs{};
  auto amps = rotated.amplitudes();
  for (std::size_t k = 0; k < amps.size(); ++k) {
    const std::size_t outcome = ((k & bi) ? 1 : 0) + ((k & bj) ? 2 : 0);
    probs[outcome] += std::norm(amps[k]);
  }
  return probs;
}

BellMeasurement bell_measure(const StateVector& state, std::size_t i, std::size_t j, Rng& rng) {
  if (i == j) throw InvalidSpec("bell_measure: qubit indices coincide");
  StateVector rotated = state;
  rotated.bell_to_computational(i, j);
  const int mi = rotated.measure(i, rng);
  const int mj = rotated.measure(j, rng);
  rotated.computational_to_bell(i, j);
  return {static_cast<BellOutcome>(mi + 2 * mj), std::move(rotated)};
}

// ------------------------------------------------------ partial trace & info

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep) {
  const std::size_t n = rho.num_qubits();
  if (keep.empty()) throw InvalidSpec("partial_trace: keep set is empty");
  std::vector<std::size_t> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  if (std::adjacent_find(kept.begin(), kept.end()) != kept.end())
    throw InvalidSpec("partial_trace: duplicate qubit in keep set");
  if (kept.back() >= n) throw InvalidSpec("partial_trace: qubit index out of range");

  std::vector<std::size_t> traced;
  for (std::size_t q = 0; q < n; ++q)
    if (!std::binary_search(kept.begin(), kept.end(), q)) traced.push_back(q);

  auto scatter = [](std::size_t value, const std::vector<std::size_t>& positions) {
    std::size_t out = 0;
    for (std::size_t b = 0; b < positions.size(); ++b)
      if (value & (std::size_t{1} << b)) out |= std::size_t{1} << positions[b];
    return out;
  };
  const std::size_t kdim = std::size_t{1} << kept.size();
  const std::size_t tdim = std::size_t{1} << traced.size();
  std::vector<std::size_t> kmap(kdim), tmap(tdim);
  for (std::size_t r = 0; r < kdim; ++r) kmap[r] = scatter(r, kept);
  for (std::size_t t = 0; t < tdim; ++t) tmap[t] = scatter(t, traced);

  const auto& m = rho.matrix();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(kdim), static_cast<Eigen::Index>(kdim));
  for (std::size_t r = 0; r < kdim; ++r)
    for (std::size_t c = 0; c < kdim; ++c) {
      Complex sum = 0.0;
      for (std::size_t t = 0; t < tdim; ++t)
        sum += m(static_cast<Eigen::Index>(kmap[r] | tmap[t]), static_cast<Eigen::Index>(kmap[c] | tmap[t]));
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = sum;
    }
  return DensityMatrix(kept.size(), std::move(out));
}

double von_neumann_entropy(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho.matrix(), Eigen::EigenvaluesOnly);
  double entropy = 0.0;
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
    double lambda = solver.eigenvalues()[k];
    if (lambda < 0.0) lambda = 0.0;
    entropy += log2_entropy_term(lambda);
  }
  return std::max(0.0, entropy);
}

double holevo_information(std::span<const EnsembleMember> ensemble) {
  if (ensemble.empty()) throw InvalidSpec("holevo_information: empty ensemble");
  const std::size_t n = ensemble.front().state.num_qubits();
  const auto dim = ensemble.front().state.matrix().rows();
  Eigen::MatrixXcd average = Eigen::MatrixXcd::Zero(dim, dim);
  double total = 0.0;
  double conditional = 0.0;
  for (const auto& member : ensemble) {
    if (member.probability < 0.0) throw InvalidSpec("holevo_information: negative probability");
    if (member.state.num_qubits() != n) throw InvalidSpec("holevo_information: states differ in size");
    total += member.probability;
    average += member.probability * member.state.matrix();
    if (member.probability > 0.0) conditional += member.probability * von_neumann_entropy(member.state);
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidSpec("holevo_information: probabilities must sum to 1");
  average = (average + average.adjoint()) / 2.0;
  return std::max(0.0, von_neumann_entropy(DensityMatrix(n, std::move(average))) - conditional);
}

// ------------------------------------------------------------------- probes

void ProbeAttackSpec::validate() const {
  if (!(theta >= 0.0 && theta <= std::numbers::pi / 2.0 + 1e-12))
    throw InvalidSpec("ProbeAttackSpec: theta must lie in [0, pi/2]");
  if (probe_initial.num_qubits() != 1) throw InvalidSpec("ProbeAttackSpec: probe must be a single qubit");
}

Eigen::Matrix4cd ProbeAttackSpec::unitary() const {
  validate();
  const Gate r = gates::ry(2.0 * theta);
  Eigen::Matrix4cd u = Eigen::Matrix4cd::Zero();
  // Index = system + 2 * probe.
  u(0, 0) = 1.0;
  u(2, 2) = 1.0;
  for (int pout = 0; pout < 2; ++pout)
    for (int pin = 0; pin < 2; ++pin) u(1 + 2 * pout, 1 + 2 * pin) = r(pout, pin);
  return u;
}

StateVector probe_interact(const StateVector& system, const ProbeAttackSpec& spec, std::size_t target) {
  spec.validate();
  if (target >= system.num_qubits()) throw InvalidSpec("probe_interact: target qubit out of range");
  StateVector joint = system.tensor(spec.probe_initial);
  joint.apply_controlled(gates::ry(2.0 * spec.theta), target, system.num_qubits());
  return joint;
}

// ----------------------------------------------------------------- channels

Eigen::MatrixXcd embed_operator(const Gate& op, std::size_t qubit, std::size_t num_qubits) {
  if (qubit >= num_qubits) throw InvalidSpec("embed_operator: qubit out of range");
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  // Kronecker order puts the highest qubit leftmost.
  for (std::size_t q = num_qubits; q-- > 0;) {
    const Gate factor = (q == qubit) ? op : gates::identity();
    Eigen::MatrixXcd next(out.rows() * 2, out.cols() * 2);
    for (Eigen::Index r = 0; r < out.rows(); ++r)
      for (Eigen::Index c = 0; c < out.cols(); ++c)
        next.block<2, 2>(2 * r, 2 * c) = out(r, c) * factor;
    out = std::move(next);
  }
  return out;
}

DensityMatrix apply_channel(const DensityMatrix& rho, const NoiseChannel& channel, std::size_t qubit) {
  const double p = channel.probability;
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidSpec("apply_channel: probability must lie in [0,1]");
  const std::size_t n = rho.num_qubits();
  const auto& m = rho.matrix();
  auto conj = [&](const Gate& g) {
    const Eigen::MatrixXcd op = embed_operator(g, qubit, n);
    return Eigen::MatrixXcd(op * m * op.adjoint());
  };
  Eigen::MatrixXcd out;
  switch (channel.kind) {
    case ChannelKind::depolarizing:
      out = (1.0 - 0.75 * p) * m +
            0.25 * p * (conj(gates::pauli_x()) + conj(gates::pauli_y()) + conj(gates::pauli_z()));
      break;
    case ChannelKind::bit_flip:
      out = (1.0 - p) * m + p * conj(gates::pauli_x());
      break;
  }
  return DensityMatrix(n, std::move(out));
}

}  // namespace orthosim::quantum
