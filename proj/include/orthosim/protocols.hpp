#pragma once

// Protocol state machines and the reductions between protocol classes.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "orthosim/adversary.hpp"
#include "orthosim/gpt.hpp"
#include "orthosim/metrics.hpp"
#include "orthosim/random.hpp"
#include "orthosim/transport.hpp"

namespace orthosim::protocols {

enum class ProtocolKind { glt2s, stream_qkd, pop_qsdc };

/// Key: the payload is a fresh random key. Message: the payload is a
/// caller-supplied message (direct communication).
enum class Task { key, message };

const char* to_string(ProtocolKind kind);
const char* to_string(Task task);
std::optional<ProtocolKind> parse_kind(const std::string& text);
std::optional<Task> parse_task(const std::string& text);

struct Diagnostic {
  std::string field;
  std::string message;
};

struct ProtocolConfig {
  ProtocolKind kind = ProtocolKind::glt2s;
  Task task = Task::key;
  /// GLT theory; ignored by the quantum protocols.
  gpt::FiducialSpec theory{};
  /// glt2s: number of gbits n.
  std::size_t key_length = 1000;
  /// stream-qkd: rounds (one singlet each). pop-qsdc: N, with 3N singlets.
  std::size_t block_pairs = 4;
  double check_fraction = 0.5;
  /// e0. Unset: 0 for glt2s, adversary::kCalibratedThreshold otherwise.
  std::optional<double> abort_threshold;
  adversary::AdversarySpec adversary{};
  transport::NoiseSpec noise{};
  std::uint64_t seed = 0;
  /// pop-qsdc payload.
  std::vector<bool> message;
  /// Chain of reductions that produced this config, oldest first.
  std::vector<std::string> provenance;

  double threshold() const;
  /// Empty when every invariant holds.
  std::vector<Diagnostic> validate() const;
  /// Throws InvalidSpec carrying the first diagnostic.
  void require_valid() const;

  friend bool operator==(const ProtocolConfig&, const ProtocolConfig&) = default;
};

enum class Outcome { completed, aborted };
const char* to_string(Outcome outcome);

struct RunMetrics {
  /// Plug-in I(A:B) on the delivered payload units (bits for glt2s, dense
  /// symbols for the Bell-pair protocols).
  std::optional<double> info_ab;
  metrics::SecurityVerdict verdict;
};

struct RunResult {
  ProtocolKind kind = ProtocolKind::glt2s;
  Outcome outcome = Outcome::completed;
  std::string abort_reason;
  double error_rate = 0.0;
  double threshold = 0.0;
  std::size_t checked_units = 0;
  std::size_t error_count = 0;
  /// Raw units received and units kept after sifting (glt2s has no sifting).
  std::size_t raw_bits = 0;
  std::size_t sifted_bits = 0;
  /// Alice's key or message and Bob's reconstruction; Bob's is empty on abort.
  std::vector<bool> alice_payload;
  std::vector<bool> bob_payload;
  std::size_t repetition_length = 0;
  RunMetrics metrics;
  std::optional<adversary::AttackReport> attack;
  transport::Transcript transcript;

  bool payload_agrees() const { return outcome == Outcome::completed && alice_payload == bob_payload; }
};

RunResult run_glt2s(const ProtocolConfig& config);
RunResult run_stream_qkd(const ProtocolConfig& config);
RunResult run_pop_qsdc(const ProtocolConfig& config);
RunResult run(const ProtocolConfig& config);

/// Streaming QKD to permutation-of-particles QSDC: same physical parameters,
/// block transmission, and an empty message slot.
ProtocolConfig block_reduce(const ProtocolConfig& qkd);

/// QSDC to key distribution: the message becomes a fresh uniform key drawn
/// from the config's seed.
ProtocolConfig key_reduce(const ProtocolConfig& qsdc, std::size_t key_length);

struct QkaResult {
  std::vector<std::size_t> coordinates;
  std::vector<bool> key;
};

/// Bob announces a uniform half of the coordinates; the key is the bits there.
QkaResult derive_qka(const std::vector<bool>& qkd_key, Rng& rng);

/// Key bits at announced coordinates. Requires m/2 distinct in-range coordinates.
QkaResult derive_qka_at(const std::vector<bool>& qkd_key, std::vector<std::size_t> coordinates);

/// Independent random streams of one run.
struct PartyRngs {
  Rng alice;
  Rng bob;
  Rng eve;
  Rng noise;

  explicit PartyRngs(std::uint64_t seed);
};

}  // namespace orthosim::protocols
