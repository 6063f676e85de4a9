#include "orthosim/transport.hpp"

#include <algorithm>
#include <json.hpp>
#include <numeric>
#include <sstream>

#include "orthosim/error.hpp"

namespace orthosim::transport {

// -------------------------------------------------------------- Permutation

Permutation::Permutation(std::vector<std::size_t> mapping) : mapping_(std::move(mapping)) {
  inverse_.assign(mapping_.size(), mapping_.size());
  for (std::size_t slot = 0; slot < mapping_.size(); ++slot) {
    const std::size_t source = mapping_[slot];
    if (source >= mapping_.size() || inverse_[source] != mapping_.size())
      throw InvalidSpec("Permutation: mapping is not a bijection");
    inverse_[source] = slot;
  }
}

Permutation Permutation::identity(std::size_t size) {
  std::vector<std::size_t> m(size);
  std::iota(m.begin(), m.end(), std::size_t{0});
  return Permutation(std::move(m));
}

Permutation Permutation::reversal(std::size_t size) {
  std::vector<std::size_t> m(size);
  for (std::size_t i = 0; i < size; ++i) m[i] = size - 1 - i;
  return Permutation(std::move(m));
}

Permutation Permutation::random(std::size_t size, Rng& rng) {
  std::vector<std::size_t> m(size);
  std::iota(m.begin(), m.end(), std::size_t{0});
  rng.shuffle(m);
  return Permutation(std::move(m));
}

Permutation Permutation::inverse() const { return Permutation(inverse_); }

Permutation Permutation::compose(const Permutation& other) const {
  if (other.size() != size()) throw InvalidSpec("Permutation::compose: size mismatch");
  // Delivering through `other` then through this: slot i holds other's slot
  // mapping_[i], which holds source other.mapping_[mapping_[i]].
  std::vector<std::size_t> m(size());
  for (std::size_t i = 0; i < size(); ++i) m[i] = other.mapping_[mapping_[i]];
  return Permutation(std::move(m));
}

// ---------------------------------------------------------------- names

const char* to_string(Party party) {
  switch (party) {
    case Party::alice: return "alice";
    case Party::bob: return "bob";
    case Party::eve: return "eve";
  }
  return "?";
}

const char* to_string(ChannelKind kind) { return kind == ChannelKind::classical ? "classical" : "carrier"; }

const char* to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::none: return "none";
    case NoiseKind::depolarizing: return "depolarizing";
    case NoiseKind::bit_flip: return "bit-flip";
  }
  return "?";
}

namespace {

Party party_from(const std::string& s) {
  if (s == "alice") return Party::alice;
  if (s == "bob") return Party::bob;
  if (s == "eve") return Party::eve;
  throw InvalidSpec("transcript: unknown sender '" + s + "'");
}

ChannelKind channel_from(const std::string& s) {
  if (s == "classical") return ChannelKind::classical;
  if (s == "carrier") return ChannelKind::carrier;
  throw InvalidSpec("transcript: unknown channel '" + s + "'");
}

std::string describe(const Carrier& carrier) {
  if (const auto* id = std::get_if<quantum::ParticleId>(&carrier)) return "qubit:" + std::to_string(id->value);
  const auto& state = std::get<gpt::GptState>(carrier);
  return "gbit:" + std::to_string(state.spec().fiducials) + "x" + std::to_string(state.spec().outcomes);
}

}  // namespace

// -------------------------------------------------------------- payloads

std::string encode_payload(const ClassicalMessage& message) {
  std::string out = message.topic;
  out += ':';
  for (std::size_t i = 0; i < message.data.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(message.data[i]);
  }
  return out;
}

std::optional<ClassicalMessage> decode_payload(const std::string& payload) {
  const auto colon = payload.find(':');
  if (colon == std::string::npos || colon == 0) return std::nullopt;
  ClassicalMessage m;
  m.topic = payload.substr(0, colon);
  std::string rest = payload.substr(colon + 1);
  std::size_t pos = 0;
  while (pos < rest.size()) {
    std::size_t end = rest.find(',', pos);
    if (end == std::string::npos) end = rest.size();
    try {
      std::size_t used = 0;
      const std::string token = rest.substr(pos, end - pos);
      m.data.push_back(std::stoll(token, &used));
      if (used != token.size()) return std::nullopt;
    } catch (const std::exception&) {
      return std::nullopt;
    }
    pos = end + 1;
  }
  return m;
}

// -------------------------------------------------------------- Transcript

void Transcript::push(TranscriptRecord record) {
  record.round = records_.size();
  records_.push_back(std::move(record));
}

void Transcript::append_classical(Party sender, const ClassicalMessage& message) {
  push({0, ChannelKind::classical, sender, encode_payload(message), false});
}

void Transcript::append_carrier(Party sender, std::string descriptor, bool tampered) {
  push({0, ChannelKind::carrier, sender, std::move(descriptor), tampered});
}

void Transcript::write_jsonl(std::ostream& out) const {
  for (const auto& r : records_) {
    nlohmann::ordered_json j;
    j["round"] = r.round;
    j["channel"] = to_string(r.channel);
    j["sender"] = to_string(r.sender);
    j["payload"] = r.payload;
    j["tampered"] = r.tampered;
    out << j.dump() << '\n';
  }
}

std::string Transcript::to_jsonl() const {
  std::ostringstream os;
  write_jsonl(os);
  return os.str();
}

Transcript Transcript::read_jsonl(std::istream& in) {
  Transcript t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      TranscriptRecord r;
      r.round = j.at("round").get<std::uint64_t>();
      r.channel = channel_from(j.at("channel").get<std::string>());
      r.sender = party_from(j.at("sender").get<std::string>());
      r.payload = j.at("payload").get<std::string>();
      r.tampered = j.at("tampered").get<bool>();
      if (!t.records_.empty() && r.round <= t.records_.back().round)
        throw InvalidSpec("round indices must be strictly increasing");
      if (r.channel == ChannelKind::classical && r.tampered)
        throw InvalidSpec("classical records cannot be tampered");
      t.records_.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw InvalidSpec("transcript line " + std::to_string(line_no) + ": " + e.what());
    } catch (const InvalidSpec& e) {
      throw InvalidSpec("transcript line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return t;
}

// -------------------------------------------------------------------- noise

void apply_noise(Carrier& carrier, const NoiseSpec& noise, quantum::QuantumRegistry* registry, Rng& rng) {
  if (noise.kind == NoiseKind::none || noise.probability == 0.0) return;
  if (!(noise.probability >= 0.0 && noise.probability <= 1.0))
    throw InvalidSpec("apply_noise: probability must lie in [0,1]");
  if (auto* id = std::get_if<quantum::ParticleId>(&carrier)) {
    if (registry == nullptr) throw InvalidSpec("apply_noise: qubit carrier without a registry");
    const auto kind = noise.kind == NoiseKind::bit_flip ? quantum::ChannelKind::bit_flip
                                                        : quantum::ChannelKind::depolarizing;
    registry->apply_noise(*id, {kind, noise.probability}, rng);
    return;
  }
  auto& state = std::get<gpt::GptState>(carrier);
  if (!rng.bernoulli(noise.probability)) return;
  const auto spec = state.spec();
  if (noise.kind == NoiseKind::depolarizing) {
    state = gpt::GptState::maximally_mixed(spec);
  } else {
    std::vector<double> flipped(spec.fiducials * spec.outcomes);
    for (std::size_t mu = 0; mu < spec.fiducials; ++mu)
      for (std::size_t a = 0; a < spec.outcomes; ++a)
        flipped[mu * spec.outcomes + (spec.outcomes - 1 - a)] = state.prob(mu, a);
    state = gpt::GptState(spec, std::move(flipped));
  }
}

// --------------------------------------------------------------------- Link

Link::Link(NoiseSpec noise, Rng noise_rng, quantum::QuantumRegistry* registry)
    : noise_(noise), noise_rng_(noise_rng), registry_(registry) {}

std::vector<Carrier> Link::send_block(Party sender, std::vector<Carrier> carriers, const Permutation& order,
                                      CarrierInterceptor* eve) {
  if (order.size() != carriers.size()) throw InvalidSpec("send_block: permutation size does not match block");
  {
    std::vector<std::size_t> ids;
    for (const auto& c : carriers)
      if (const auto* id = std::get_if<quantum::ParticleId>(&c)) ids.push_back(id->value);
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
      throw InvalidSpec("send_block: particle appears twice in one transmission");
  }
  std::vector<Carrier> delivered;
  delivered.reserve(carriers.size());
  for (std::size_t slot = 0; slot < carriers.size(); ++slot) {
    Carrier carrier = std::move(carriers[order.source_of(slot)]);
    bool tampered = false;
    if (eve != nullptr) {
      TransitContext context{registry_, carriers_sent_};
      tampered = eve->intercept(carrier, context);
    }
    apply_noise(carrier, noise_, registry_, noise_rng_);
    transcript_.append_carrier(sender, describe(carrier), tampered);
    ++carriers_sent_;
    delivered.push_back(std::move(carrier));
  }
  return delivered;
}

std::vector<Carrier> Link::send_stream(Party sender, std::vector<Carrier> carriers, CarrierInterceptor* eve) {
  const auto order = Permutation::identity(carriers.size());
  return send_block(sender, std::move(carriers), order, eve);
}

const ClassicalMessage& Link::classical_broadcast(Party sender, ClassicalMessage message) {
  transcript_.append_classical(sender, message);
  for (auto& v : views_) v.push_back(message);
  return views_[static_cast<std::size_t>(Party::bob)].back();
}

std::span<const ClassicalMessage> Link::view(Party party) const { return views_[static_cast<std::size_t>(party)]; }

const ClassicalMessage* Link::latest(Party party, const std::string& topic) const {
  const auto& v = views_[static_cast<std::size_t>(party)];
  for (auto it = v.rbegin(); it != v.rend(); ++it)
    if (it->topic == topic) return &*it;
  return nullptr;
}

// --------------------------------------------------------- disclosure helpers

ClassicalMessage reveal_permutation(const Permutation& order) {
  ClassicalMessage m{"permutation", {}};
  for (std::size_t s : order.mapping()) m.data.push_back(static_cast<std::int64_t>(s));
  return m;
}

Permutation permutation_from_message(const ClassicalMessage& message) {
  std::vector<std::size_t> mapping;
  for (auto v : message.data) {
    if (v < 0) throw InvalidSpec("permutation_from_message: negative index");
    mapping.push_back(static_cast<std::size_t>(v));
  }
  return Permutation(std::move(mapping));
}

ClassicalMessage reveal_positions(const Permutation& order, std::span<const std::size_t> sources, std::string topic) {
  ClassicalMessage m{std::move(topic), {}};
  for (std::size_t s : sources) {
    m.data.push_back(static_cast<std::int64_t>(s));
    m.data.push_back(static_cast<std::int64_t>(order.slot_of(s)));
  }
  return m;
}

}  // namespace orthosim::transport
