#include <cmath>
#include <numbers>

#include "orthosim/error.hpp"
#include "orthosim/protocols.hpp"

namespace orthosim::protocols {

const char* to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::glt2s: return "glt2s";
    case ProtocolKind::stream_qkd: return "stream-qkd";
    case ProtocolKind::pop_qsdc: return "pop-qsdc";
  }
  return "?";
}

const char* to_string(Task task) { return task == Task::key ? "key" : "message"; }

const char* to_string(Outcome outcome) { return outcome == Outcome::completed ? "completed" : "aborted"; }

std::optional<ProtocolKind> parse_kind(const std::string& text) {
  for (auto k : {ProtocolKind::glt2s, ProtocolKind::stream_qkd, ProtocolKind::pop_qsdc})
    if (text == to_string(k)) return k;
  return std::nullopt;
}

std::optional<Task> parse_task(const std::string& text) {
  if (text == "key") return Task::key;
  if (text == "message") return Task::message;
  return std::nullopt;
}

PartyRngs::PartyRngs(std::uint64_t seed)
    : alice(derive_seed(seed, 1)), bob(derive_seed(seed, 2)), eve(derive_seed(seed, 3)), noise(derive_seed(seed, 4)) {}

double ProtocolConfig::threshold() const {
  if (abort_threshold) return *abort_threshold;
  return kind == ProtocolKind::glt2s ? 0.0 : adversary::kCalibratedThreshold;
}

namespace {

std::size_t checkable_units(const ProtocolConfig& c) {
  switch (c.kind) {
    case ProtocolKind::glt2s: return c.key_length;
    case ProtocolKind::stream_qkd: return c.block_pairs;
    case ProtocolKind::pop_qsdc: return c.block_pairs;
  }
  return 0;
}

bool in_unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

std::vector<Diagnostic> ProtocolConfig::validate() const {
  std::vector<Diagnostic> out;
  auto fail = [&](std::string field, std::string message) { out.push_back({std::move(field), std::move(message)}); };

  const bool glt = kind == ProtocolKind::glt2s;
  if (glt) {
    if (theory.fiducials < 2) fail("fiducials", "GLT-2S needs at least 2 fiducial measurements (J >= 2)");
    if (theory.outcomes < 2) fail("outcomes", "GLT-2S needs at least 2 outcomes per fiducial (K >= 2)");
    if (key_length < 1) fail("key_length", "key length n must be at least 1");
  } else if (block_pairs < 1) {
    fail("block_pairs", "block size N must be at least 1");
  }

  if (!(check_fraction > 0.0 && check_fraction <= 1.0)) {
    fail("check_fraction", "check fraction must be positive and at most 1");
  } else if (check_fraction * static_cast<double>(checkable_units(*this)) < 1.0 - 1e-12) {
    fail("check_fraction", "check fraction times checkable units must be at least 1");
  }

  const double e0 = threshold();
  if (!in_unit_interval(e0)) fail("abort_threshold", "abort threshold e0 must lie in [0, 1]");

  if (!in_unit_interval(adversary.attack_fraction)) fail("attack_fraction", "attack fraction must lie in [0, 1]");
  if (!(adversary.theta >= 0.0 && adversary.theta <= std::numbers::pi / 2))
    fail("theta", "probe angle must lie in [0, pi/2]");
  using adversary::Strategy;
  if (glt && (adversary.strategy == Strategy::intercept_resend || adversary.strategy == Strategy::probe))
    fail("strategy", "quantum attacks do not apply to gbit carriers");
  if (!glt && adversary.strategy == Strategy::glt_intercept_resend)
    fail("strategy", "fiducial intercept-resend applies only to GLT-2S");

  if (!in_unit_interval(noise.probability)) fail("probability", "noise probability must lie in [0, 1]");

  if (kind != ProtocolKind::pop_qsdc) {
    if (task != Task::key) fail("task", "only pop-qsdc carries a message");
    if (!message.empty()) fail("message", "only pop-qsdc carries a message");
  } else if (in_unit_interval(e0)) {
    if (!message.empty() && e0 >= 0.5) {
      fail("abort_threshold", "repetition coding needs e0 < 1/2");
    } else if (!message.empty()) {
      const std::size_t capacity = metrics::qsdc_capacity(block_pairs, e0);
      if (message.size() > capacity)
        fail("message", "message length " + std::to_string(message.size()) + " exceeds capacity floor(2N(1-h(e0))) = " +
                            std::to_string(capacity));
      const std::size_t r = metrics::repetition_length(e0);
      if (message.size() * r > 2 * block_pairs)
        fail("message", "repetition-coded length " + std::to_string(message.size() * r) + " exceeds the 2N = " +
                            std::to_string(2 * block_pairs) + " bits one block carries");
    }
  }
  return out;
}

void ProtocolConfig::require_valid() const {
  const auto diagnostics = validate();
  if (!diagnostics.empty())
    throw InvalidSpec("invalid config: " + diagnostics.front().field + ": " + diagnostics.front().message);
}

RunResult run(const ProtocolConfig& config) {
  switch (config.kind) {
    case ProtocolKind::glt2s: return run_glt2s(config);
    case ProtocolKind::stream_qkd: return run_stream_qkd(config);
    case ProtocolKind::pop_qsdc: return run_pop_qsdc(config);
  }
  throw InvalidSpec("run: unknown protocol kind");
}

}  // namespace orthosim::protocols
