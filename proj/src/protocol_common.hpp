#pragma once

// Helpers shared by the protocol state machines.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "orthosim/protocols.hpp"

namespace orthosim::protocols::detail {

/// llround(f * units), at least 1 and at most `units`.
inline std::size_t check_count(double fraction, std::size_t units) {
  const auto c = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(units)));
  return std::clamp<std::size_t>(c, 1, units);
}

template <class T>
std::vector<std::int64_t> to_data(const std::vector<T>& values) {
  std::vector<std::int64_t> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(static_cast<std::int64_t>(v));
  return out;
}

inline std::vector<bool> symbols_to_bits(const std::vector<std::uint8_t>& symbols) {
  std::vector<bool> bits;
  bits.reserve(2 * symbols.size());
  for (auto s : symbols) {
    bits.push_back((s & 2) != 0);
    bits.push_back((s & 1) != 0);
  }
  return bits;
}

/// Plug-in I(A:B) over paired symbols; nullopt when there are none.
std::optional<double> symbol_information(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b,
                                         std::size_t alphabet);

/// Fills metrics.info_ab and the QKD verdict.
void finish_qkd_metrics(RunResult& result, std::optional<double> info_ab);

}  // namespace orthosim::protocols::detail
