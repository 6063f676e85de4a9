#include <memory>

#include "orthosim/error.hpp"
#include "protocol_common.hpp"

namespace orthosim::protocols {

namespace detail {

std::optional<double> symbol_information(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b,
                                         std::size_t alphabet) {
  if (a.empty() || a.size() != b.size()) return std::nullopt;
  metrics::JointCounts counts(alphabet, alphabet);
  for (std::size_t i = 0; i < a.size(); ++i) counts.add(a[i], b[i]);
  return metrics::mutual_information(counts);
}

void finish_qkd_metrics(RunResult& result, std::optional<double> info_ab) {
  result.metrics.info_ab = info_ab;
  const double info_ae = result.attack && result.attack->eve_information ? *result.attack->eve_information : 0.0;
  result.metrics.verdict =
      metrics::check_qkd_condition(result.error_rate, result.threshold, info_ab.value_or(0.0), info_ae);
}

}  // namespace detail

RunResult run_glt2s(const ProtocolConfig& config) {
  config.require_valid();
  const gpt::FiducialSpec spec = config.theory;
  const std::size_t n = config.key_length;
  PartyRngs rng(config.seed);

  RunResult result;
  result.kind = ProtocolKind::glt2s;
  result.threshold = config.threshold();

  std::unique_ptr<adversary::GltInterceptor> eve;
  if (config.adversary.strategy == adversary::Strategy::glt_intercept_resend)
    eve = std::make_unique<adversary::GltInterceptor>(rng.eve, config.adversary.attack_fraction);

  // Alice: one codeword gbit per random bit.
  const std::vector<bool> x = random_bits(n, rng.alice);
  const gpt::GptState zero = gpt::PureGbit::codeword(spec, false).state();
  const gpt::GptState one = gpt::PureGbit::codeword(spec, true).state();
  std::vector<transport::Carrier> carriers;
  carriers.reserve(n);
  for (bool bit : x) carriers.emplace_back(bit ? one : zero);

  transport::Link link(config.noise, rng.noise);
  const auto received = link.send_stream(transport::Party::alice, std::move(carriers), eve.get());

  // Bob: uniformly random fiducial per gbit. The codewords differ in every
  // row, so every received bit is already sifted.
  std::vector<std::size_t> outcomes(n);
  std::vector<bool> bob_bits(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& state = std::get<gpt::GptState>(received[i]);
    const auto fiducial = static_cast<std::size_t>(rng.bob.below(spec.fiducials));
    outcomes[i] = gpt::measure_fiducial(state, fiducial, rng.bob).outcome;
    bob_bits[i] = outcomes[i] == spec.outcomes - 1;
  }
  result.raw_bits = n;
  result.sifted_bits = n;

  // Public check on a random subset of coordinates.
  const auto checks = sample_subset(n, detail::check_count(config.check_fraction, n), rng.alice);
  link.classical_broadcast(transport::Party::alice, {"check-coordinates", detail::to_data(checks)});
  std::vector<std::size_t> reported;
  for (auto c : checks) reported.push_back(outcomes[c]);
  link.classical_broadcast(transport::Party::bob, {"check-outcomes", detail::to_data(reported)});

  std::vector<bool> mismatch(n, false);
  std::vector<bool> is_check(n, false);
  for (std::size_t k = 0; k < checks.size(); ++k) {
    const std::size_t expected = x[checks[k]] ? spec.outcomes - 1 : 0;
    mismatch[checks[k]] = reported[k] != expected;
    is_check[checks[k]] = true;
    result.error_count += mismatch[checks[k]] ? 1 : 0;
  }
  result.checked_units = checks.size();
  result.error_rate = static_cast<double>(result.error_count) / static_cast<double>(checks.size());
  link.classical_broadcast(transport::Party::alice,
                           {"check-verdict", {static_cast<std::int64_t>(result.error_count)}});

  std::vector<std::uint8_t> key_a, key_b;
  for (std::size_t i = 0; i < n; ++i) {
    if (is_check[i]) continue;
    result.alice_payload.push_back(x[i]);
    key_a.push_back(x[i]);
    key_b.push_back(bob_bits[i]);
  }

  if (result.error_rate > result.threshold) {
    result.outcome = Outcome::aborted;
    result.abort_reason = "check mismatch fraction exceeds e0";
  } else {
    result.bob_payload.assign(key_b.begin(), key_b.end());
  }

  if (eve) {
    adversary::AttackReport report;
    report.strategy = adversary::to_string(config.adversary.strategy);
    report.rounds_attacked = eve->log().size();
    for (const auto& rec : eve->log())
      if (is_check[rec.transit_index]) report.detection_events.push_back(mismatch[rec.transit_index]);
    if (!report.detection_events.empty())
      report.empirical_detection =
          static_cast<double>(std::count(report.detection_events.begin(), report.detection_events.end(), true)) /
          static_cast<double>(report.detection_events.size());
    report.analytic_escape =
        adversary::escape_probability(spec.fiducials, spec.outcomes, report.rounds_attacked, config.check_fraction);
    // A single fiducial outcome identifies the codeword, so each attacked
    // gbit gives Eve one full bit.
    report.eve_information = static_cast<double>(report.rounds_attacked) / static_cast<double>(n);
    result.attack = std::move(report);
  }

  detail::finish_qkd_metrics(result, detail::symbol_information(key_a, key_b, 2));
  result.transcript = link.take_transcript();
  return result;
}

}  // namespace orthosim::protocols
