#pragma once

// Simulated channel layer: an authenticated public classical channel and a
// tamperable carrier channel with an adversary interposition hook.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "orthosim/error.hpp"
#include "orthosim/gpt.hpp"
#include "orthosim/registry.hpp"

namespace orthosim::transport {

/// Bijection on delivery slots: slot i of a transmission carries source item
/// mapping()[i].
class Permutation {
 public:
  explicit Permutation(std::vector<std::size_t> mapping);

  static Permutation identity(std::size_t size);
  static Permutation reversal(std::size_t size);
  /// Uniform over S_size (Fisher-Yates).
  static Permutation random(std::size_t size, Rng& rng);

  std::size_t size() const { return mapping_.size(); }
  /// Source index delivered in slot `slot`.
  std::size_t source_of(std::size_t slot) const { return mapping_.at(slot); }
  /// Delivery slot of source index `source`.
  std::size_t slot_of(std::size_t source) const { return inverse_.at(source); }
  std::span<const std::size_t> mapping() const { return mapping_; }

  Permutation inverse() const;
  /// (this o other): first apply `other`, then this.
  Permutation compose(const Permutation& other) const;

  friend bool operator==(const Permutation& a, const Permutation& b) { return a.mapping_ == b.mapping_; }

 private:
  std::vector<std::size_t> mapping_;
  std::vector<std::size_t> inverse_;
};

enum class Party : std::uint8_t { alice, bob, eve };
enum class ChannelKind : std::uint8_t { classical, carrier };

const char* to_string(Party party);
const char* to_string(ChannelKind kind);

using Carrier = std::variant<quantum::ParticleId, gpt::GptState>;

struct ClassicalMessage {
  std::string topic;
  std::vector<std::int64_t> data;

  friend bool operator==(const ClassicalMessage&, const ClassicalMessage&) = default;
};

struct TranscriptRecord {
  std::uint64_t round = 0;
  ChannelKind channel = ChannelKind::classical;
  Party sender = Party::alice;
  std::string payload;
  bool tampered = false;

  friend bool operator==(const TranscriptRecord&, const TranscriptRecord&) = default;
};

/// Ordered log of everything that crossed either channel.
class Transcript {
 public:
  void append_classical(Party sender, const ClassicalMessage& message);
  void append_carrier(Party sender, std::string descriptor, bool tampered);

  std::span<const TranscriptRecord> records() const { return records_; }
  std::size_t size() const { return records_.size(); }

  /// One JSON object per line, fields in the order
  /// round, channel, sender, payload, tampered.
  void write_jsonl(std::ostream& out) const;
  std::string to_jsonl() const;
  /// Inverse of write_jsonl. Throws InvalidSpec on malformed lines or
  /// records that violate the transcript invariants.
  static Transcript read_jsonl(std::istream& in);

  friend bool operator==(const Transcript&, const Transcript&) = default;

 private:
  void push(TranscriptRecord record);
  std::vector<TranscriptRecord> records_;
};

/// "topic:v1,v2,..." as stored in the transcript.
std::string encode_payload(const ClassicalMessage& message);
std::optional<ClassicalMessage> decode_payload(const std::string& payload);

/// What an interceptor may see of a carrier in transit. There is
/// deliberately no permutation here: Eve only ever sees the delivery order.
struct TransitContext {
  quantum::QuantumRegistry* registry = nullptr;
  std::size_t transit_index = 0;
};

class CarrierInterceptor {
 public:
  virtual ~CarrierInterceptor() = default;
  /// Operates on the carrier in place; returns true if it was tampered with.
  virtual bool intercept(Carrier& carrier, TransitContext& context) = 0;
};

enum class NoiseKind { none, depolarizing, bit_flip };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::none;
  double probability = 0.0;

  friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

const char* to_string(NoiseKind kind);

/// Channel noise on one carrier. Qubits get one sampled Pauli trajectory of
/// the matching quantum channel. Gbits are replaced by the maximally mixed
/// state (depolarizing) or have every row's outcomes reversed (bit flip),
/// each with the given probability.
void apply_noise(Carrier& carrier, const NoiseSpec& noise, quantum::QuantumRegistry* registry, Rng& rng);

/// The pair of channels connecting Alice and Bob, plus Eve's vantage point.
class Link {
 public:
  Link(NoiseSpec noise, Rng noise_rng, quantum::QuantumRegistry* registry = nullptr);

  /// Delivers `carriers` in the order given by `order`. The interceptor, when
  /// present, acts on each carrier in delivery order before channel noise.
  /// Throws InvalidSpec on a size mismatch or a particle sent twice.
  std::vector<Carrier> send_block(Party sender, std::vector<Carrier> carriers, const Permutation& order,
                                  CarrierInterceptor* eve);

  /// Sequential streaming: send_block with the identity order.
  std::vector<Carrier> send_stream(Party sender, std::vector<Carrier> carriers, CarrierInterceptor* eve);

  /// Authenticated broadcast: every party (Eve included) receives the
  /// message unmodified. The reference is invalidated by the next broadcast.
  const ClassicalMessage& classical_broadcast(Party sender, ClassicalMessage message);

  std::span<const ClassicalMessage> view(Party party) const;
  /// Latest message on `topic` in a party's view.
  const ClassicalMessage* latest(Party party, const std::string& topic) const;

  const Transcript& transcript() const { return transcript_; }
  Transcript take_transcript() { return std::move(transcript_); }
  std::size_t carriers_sent() const { return carriers_sent_; }

 private:
  NoiseSpec noise_;
  Rng noise_rng_;
  quantum::QuantumRegistry* registry_;
  Transcript transcript_;
  std::array<std::vector<ClassicalMessage>, 3> views_;
  std::size_t carriers_sent_ = 0;
};

/// Full disclosure of a permutation.
ClassicalMessage reveal_permutation(const Permutation& order);
Permutation permutation_from_message(const ClassicalMessage& message);

/// Partial disclosure: (source, slot) pairs for the listed source indices.
ClassicalMessage reveal_positions(const Permutation& order, std::span<const std::size_t> sources,
                                  std::string topic = "reveal-positions");

/// Restores source order: result[order.source_of(i)] = received[i].
template <class T>
std::vector<T> unscramble(std::span<const T> received, const Permutation& order) {
  if (received.size() != order.size()) throw InvalidSpec("unscramble: size mismatch");
  std::vector<std::optional<T>> slots(received.size());
  for (std::size_t i = 0; i < received.size(); ++i) slots[order.source_of(i)] = received[i];
  std::vector<T> out;
  out.reserve(received.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// Unscrambles only the coordinates disclosed by reveal_positions: returns
/// (source index, item) in disclosure order.
template <class T>
std::vector<std::pair<std::size_t, T>> unscramble_partial(std::span<const T> received,
                                                          const ClassicalMessage& disclosure) {
  if (disclosure.data.size() % 2 != 0) throw InvalidSpec("unscramble_partial: malformed disclosure");
  std::vector<std::pair<std::size_t, T>> out;
  for (std::size_t k = 0; k < disclosure.data.size(); k += 2) {
    const auto source = static_cast<std::size_t>(disclosure.data[k]);
    const auto slot = static_cast<std::size_t>(disclosure.data[k + 1]);
    if (slot >= received.size()) throw InvalidSpec("unscramble_partial: slot out of range");
    out.emplace_back(source, received[slot]);
  }
  return out;
}

}  // namespace orthosim::transport
