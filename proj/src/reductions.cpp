#include <algorithm>

#include "orthosim/error.hpp"
#include "orthosim/protocols.hpp"

namespace orthosim::protocols {

ProtocolConfig block_reduce(const ProtocolConfig& qkd) {
  if (qkd.kind != ProtocolKind::stream_qkd) throw InvalidSpec("block_reduce: input must be a stream-qkd config");
  ProtocolConfig out = qkd;
  out.kind = ProtocolKind::pop_qsdc;
  out.task = Task::message;
  out.message.clear();
  // Pin e0 so the reduced run uses the same threshold even if defaults differ.
  out.abort_threshold = qkd.threshold();
  out.provenance.push_back("block_reduce(stream-qkd)");
  return out;
}

ProtocolConfig key_reduce(const ProtocolConfig& qsdc, std::size_t key_length) {
  if (qsdc.kind != ProtocolKind::pop_qsdc) throw InvalidSpec("key_reduce: input must be a pop-qsdc config");
  ProtocolConfig out = qsdc;
  out.task = Task::key;
  out.key_length = key_length;
  Rng source(derive_seed(qsdc.seed, 0x6b6579));
  out.message = random_bits(key_length, source);
  out.provenance.push_back("key_reduce(pop-qsdc)");
  const auto diagnostics = out.validate();
  if (!diagnostics.empty()) throw InvalidSpec("key_reduce: " + diagnostics.front().message);
  return out;
}

QkaResult derive_qka(const std::vector<bool>& qkd_key, Rng& rng) {
  if (qkd_key.size() % 2 != 0) throw InvalidSpec("derive_qka: key length must be even");
  return derive_qka_at(qkd_key, sample_subset(qkd_key.size(), qkd_key.size() / 2, rng));
}

QkaResult derive_qka_at(const std::vector<bool>& qkd_key, std::vector<std::size_t> coordinates) {
  if (qkd_key.size() % 2 != 0) throw InvalidSpec("derive_qka: key length must be even");
  if (coordinates.size() != qkd_key.size() / 2) throw InvalidSpec("derive_qka: need exactly m/2 coordinates");
  std::sort(coordinates.begin(), coordinates.end());
  if (std::adjacent_find(coordinates.begin(), coordinates.end()) != coordinates.end())
    throw InvalidSpec("derive_qka: coordinates must be distinct");
  if (!coordinates.empty() && coordinates.back() >= qkd_key.size())
    throw InvalidSpec("derive_qka: coordinate out of range");
  QkaResult out;
  out.coordinates = std::move(coordinates);
  for (auto c : out.coordinates) out.key.push_back(qkd_key[c]);
  return out;
}

}  // namespace orthosim::protocols
