#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "orthosim/gpt.hpp"
#include "orthosim/quantum.hpp"
#include "orthosim/registry.hpp"
#include "orthosim/transport.hpp"

namespace orthosim::adversary {

enum class Strategy { none, glt_intercept_resend, intercept_resend, probe };
enum class Basis { z, x, random };

const char* to_string(Strategy s);
const char* to_string(Basis b);

struct AdversarySpec {
  Strategy strategy = Strategy::none;
  /// Probability that Eve acts on any given carrier.
  double attack_fraction = 1.0;
  /// intercept_resend only.
  Basis basis = Basis::z;
  /// probe only; radians in [0, pi/2].
  double theta = 0.0;

  friend bool operator==(const AdversarySpec&, const AdversarySpec&) = default;
};

struct PairingGuess {
  std::size_t pairs = 0;
  std::uint64_t matchings = 0;
  bool success = false;
  double success_probability = 0.0;
};

struct AttackReport {
  std::string strategy;
  std::size_t rounds_attacked = 0;
  /// One entry per attacked round that was also checked; true = detected.
  std::vector<bool> detection_events;
  double empirical_detection = 0.0;
  /// Probability the attack on these rounds goes unnoticed.
  double analytic_escape = 1.0;
  /// Eve's information in bits per key unit (per gbit for GLT, per pair for
  /// Bell-pair protocols). Holevo quantity for probe attacks.
  std::optional<double> eve_information;
  std::optional<PairingGuess> pairing;
};

// ------------------------------------------------------------ GLT attacks

struct GltInterception {
  std::size_t fiducial;
  std::size_t outcome;
  gpt::GptState forwarded;
};

/// Measures a uniformly chosen fiducial and returns the post-measurement state.
GltInterception glt_intercept_resend(const gpt::GptState& carrier, Rng& rng);

/// (J-1)/J * (K-1)/K: chance one attacked, checked gbit reveals Eve.
double detection_probability(std::size_t fiducials, std::size_t outcomes);

/// (1 - (J-1)/J (K-1)/K)^n.
double escape_probability(std::size_t fiducials, std::size_t outcomes, std::size_t n);

/// Per-gbit escape 1 - f (J-1)/J (K-1)/K when only a fraction f is checked.
double escape_probability(std::size_t fiducials, std::size_t outcomes, std::size_t n, double check_fraction);

class GltInterceptor : public transport::CarrierInterceptor {
 public:
  struct Record {
    std::size_t transit_index;
    std::size_t fiducial;
    std::size_t outcome;
  };

  GltInterceptor(Rng rng, double attack_fraction);
  bool intercept(transport::Carrier& carrier, transport::TransitContext& context) override;
  std::span<const Record> log() const { return log_; }

 private:
  Rng rng_;
  double attack_fraction_;
  std::vector<Record> log_;
};

// -------------------------------------------------------- quantum attacks

struct QuantumInterception {
  quantum::MeasurementBasis basis;
  int outcome;
};

/// Projective measurement in `basis` (random: fair coin between Z and X);
/// the collapsed eigenstate travels on.
QuantumInterception quantum_intercept_resend(quantum::QuantumRegistry& registry, quantum::ParticleId particle,
                                             Basis basis, Rng& rng);

/// Attaches one probe qubit to the particle; Eve keeps the returned handle.
quantum::ParticleId probe_attack(quantum::QuantumRegistry& registry, quantum::ParticleId particle,
                                 const quantum::ProbeAttackSpec& spec);

class QuantumInterceptor : public transport::CarrierInterceptor {
 public:
  struct Record {
    std::size_t transit_index;
    quantum::ParticleId particle;
    QuantumInterception result;
  };

  QuantumInterceptor(Rng rng, double attack_fraction, Basis basis);
  bool intercept(transport::Carrier& carrier, transport::TransitContext& context) override;
  std::span<const Record> log() const { return log_; }

 private:
  Rng rng_;
  double attack_fraction_;
  Basis basis_;
  std::vector<Record> log_;
};

class ProbeInterceptor : public transport::CarrierInterceptor {
 public:
  struct Record {
    std::size_t transit_index;
    quantum::ParticleId particle;
    quantum::ParticleId probe;
  };

  ProbeInterceptor(Rng rng, double attack_fraction, quantum::ProbeAttackSpec spec);
  bool intercept(transport::Carrier& carrier, transport::TransitContext& context) override;
  std::span<const Record> log() const { return log_; }

 private:
  Rng rng_;
  double attack_fraction_;
  quantum::ProbeAttackSpec spec_;
  std::vector<Record> log_;
};

// -------------------------------------------------------- exact analytics

/// Exact single-qubit trade-off for the probe family: bits encoded in Z,
/// checks prepared in X.
struct SweepPoint {
  double theta = 0.0;
  /// X-basis check error rate.
  double error_rate = 0.0;
  /// 1 - h(e): Alice-Bob information over the symmetric channel they infer
  /// from the check error rate.
  double info_ab = 0.0;
  /// Holevo quantity of Eve's probe ensemble for the Z-encoded bit.
  double info_ae = 0.0;
};

SweepPoint probe_sweep_point(double theta);

/// `points` evenly spaced theta values spanning [0, pi/2] inclusive.
std::vector<SweepPoint> probe_sweep(std::size_t points);

struct Crossing {
  double theta = 0.0;
  double error_threshold = 0.0;
  double gap = 0.0;  // I_AB - I_AE at theta
};

/// Bisects I_AB(theta) = I_AE(theta) on [0, pi/2].
Crossing calibrate_crossing(double tolerance = 1e-13);

/// e0 at the crossing, from calibrate_crossing(); see tests for the check.
inline constexpr double kCalibratedThreshold = 0.11002786443835955;

/// Exact behaviour of one dense-coded singlet sent as two particles through
/// an attacked channel.
struct PairAnalytics {
  /// transition[s][b] = P(Bob's Bell outcome decodes to symbol b | Alice sent s).
  std::array<std::array<double, 4>, 4> transition{};
  /// Expected fraction of wrong bits among the two decoded bits.
  double bit_error_rate = 0.0;
  /// I(symbol : Bob's decoded symbol), uniform symbols.
  double info_ab = 0.0;
  /// Eve's information per pair: Holevo quantity for probes, classical
  /// mutual information for intercept-resend. Eve knows the pairing.
  double info_ae = 0.0;
};

PairAnalytics stream_pair_analytics(const AdversarySpec& adversary);

/// Eve's reduced probe state (2 qubits, probe of particle 0 first) for a
/// singlet dense-coded with `symbol` and probed on both halves.
quantum::DensityMatrix pair_probe_state(std::uint8_t symbol, double theta);

/// Holevo information about an N-symbol block message when Eve holds one
/// probe per particle but does not know the permutation of the 2N
/// particles: every ordering is averaged. Exact enumeration; N <= 3.
double permutation_ignorance_holevo(double theta, std::size_t pairs);

/// (2N)! / (2^N N!).
std::uint64_t pairing_count(std::size_t pairs);

/// Every perfect matching of {0..2N-1}, each as N (low, high) pairs sorted by low.
std::vector<std::vector<std::pair<std::size_t, std::size_t>>> enumerate_pairings(std::size_t pairs);

/// Uniformly random perfect matching of {0..2N-1}.
std::vector<std::pair<std::size_t, std::size_t>> random_pairing(std::size_t pairs, Rng& rng);

/// Eve guesses a pairing of a permuted block of full pairs. `partner[i]` is
/// the position of the true partner of position i, used only for scoring.
/// When `theta` is given and N <= 3, the report carries I'(A:E) per pair.
AttackReport permutation_attack(std::span<const std::size_t> partner, Rng& rng,
                                std::optional<double> theta = std::nullopt);

}  // namespace orthosim::adversary
