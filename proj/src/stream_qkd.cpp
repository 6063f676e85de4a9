#include <bit>
#include <memory>

#include "orthosim/error.hpp"
#include "protocol_common.hpp"

namespace orthosim::protocols {

namespace {

// Attacks act per particle; a round counts as attacked when either half was.
std::unique_ptr<transport::CarrierInterceptor> make_quantum_eve(const adversary::AdversarySpec& adv, Rng eve_rng) {
  using adversary::Strategy;
  if (adv.strategy == Strategy::intercept_resend)
    return std::make_unique<adversary::QuantumInterceptor>(eve_rng, adv.attack_fraction, adv.basis);
  if (adv.strategy == Strategy::probe) {
    quantum::ProbeAttackSpec spec;
    spec.theta = adv.theta;
    return std::make_unique<adversary::ProbeInterceptor>(eve_rng, adv.attack_fraction, spec);
  }
  return nullptr;
}

std::vector<std::size_t> attacked_transits(const transport::CarrierInterceptor* eve) {
  std::vector<std::size_t> out;
  if (auto* q = dynamic_cast<const adversary::QuantumInterceptor*>(eve))
    for (const auto& r : q->log()) out.push_back(r.transit_index);
  if (auto* p = dynamic_cast<const adversary::ProbeInterceptor*>(eve))
    for (const auto& r : p->log()) out.push_back(r.transit_index);
  return out;
}

}  // namespace

RunResult run_stream_qkd(const ProtocolConfig& config) {
  config.require_valid();
  const std::size_t rounds = config.block_pairs;
  PartyRngs rng(config.seed);

  RunResult result;
  result.kind = ProtocolKind::stream_qkd;
  result.threshold = config.threshold();

  quantum::QuantumRegistry registry;
  auto eve = make_quantum_eve(config.adversary, rng.eve);

  // Alice: one singlet per round, two random bits dense-coded on the first half.
  std::vector<std::uint8_t> symbols(rounds);
  std::vector<transport::Carrier> carriers;
  carriers.reserve(2 * rounds);
  for (std::size_t k = 0; k < rounds; ++k) {
    auto [a, b] = registry.create_singlet();
    symbols[k] = static_cast<std::uint8_t>(rng.alice.below(4));
    registry.apply_dense_code(a, quantum::DenseBits::from_code(symbols[k]));
    carriers.emplace_back(a);
    carriers.emplace_back(b);
  }

  transport::Link link(config.noise, rng.noise, &registry);
  // The pairing is public: slots (2k, 2k+1) form round k.
  link.classical_broadcast(transport::Party::alice, {"pairing", {static_cast<std::int64_t>(rounds)}});
  const auto received = link.send_stream(transport::Party::alice, std::move(carriers), eve.get());

  std::vector<std::uint8_t> decoded(rounds);
  for (std::size_t k = 0; k < rounds; ++k) {
    const auto outcome = registry.bell_measure(std::get<quantum::ParticleId>(received[2 * k]),
                                               std::get<quantum::ParticleId>(received[2 * k + 1]), rng.bob);
    decoded[k] = quantum::singlet_decoding(outcome).code();
  }
  result.raw_bits = 2 * rounds;

  // Check rounds are chosen only after transmission.
  const auto checks = sample_subset(rounds, detail::check_count(config.check_fraction, rounds), rng.alice);
  std::vector<std::uint8_t> reference, report;
  for (auto c : checks) {
    reference.push_back(symbols[c]);
    report.push_back(decoded[c]);
  }
  link.classical_broadcast(transport::Party::alice, {"check-rounds", detail::to_data(checks)});
  link.classical_broadcast(transport::Party::alice, {"check-reference", detail::to_data(detail::symbols_to_bits(reference))});
  link.classical_broadcast(transport::Party::bob, {"check-report", detail::to_data(detail::symbols_to_bits(report))});

  std::vector<bool> is_check(rounds, false);
  std::vector<bool> symbol_error(rounds, false);
  for (auto c : checks) {
    is_check[c] = true;
    const int wrong = std::popcount(static_cast<unsigned>(symbols[c] ^ decoded[c]));
    symbol_error[c] = wrong != 0;
    result.error_count += static_cast<std::size_t>(wrong);
  }
  result.checked_units = checks.size();
  result.error_rate = static_cast<double>(result.error_count) / static_cast<double>(2 * checks.size());

  std::vector<std::uint8_t> key_a, key_b;
  for (std::size_t k = 0; k < rounds; ++k) {
    if (is_check[k]) continue;
    key_a.push_back(symbols[k]);
    key_b.push_back(decoded[k]);
  }
  result.alice_payload = detail::symbols_to_bits(key_a);
  result.sifted_bits = result.alice_payload.size();

  if (result.error_rate > result.threshold) {
    result.outcome = Outcome::aborted;
    result.abort_reason = "check-round bit error rate exceeds e0";
  } else {
    result.bob_payload = detail::symbols_to_bits(key_b);
  }

  if (eve) {
    adversary::AttackReport report_out;
    report_out.strategy = adversary::to_string(config.adversary.strategy);
    std::vector<int> halves_attacked(rounds, 0);
    for (auto t : attacked_transits(eve.get())) ++halves_attacked[t / 2];
    report_out.rounds_attacked =
        static_cast<std::size_t>(std::count_if(halves_attacked.begin(), halves_attacked.end(), [](int h) { return h > 0; }));
    for (std::size_t k = 0; k < rounds; ++k)
      if (halves_attacked[k] > 0 && is_check[k]) report_out.detection_events.push_back(symbol_error[k]);
    if (!report_out.detection_events.empty())
      report_out.empirical_detection =
          static_cast<double>(std::count(report_out.detection_events.begin(), report_out.detection_events.end(), true)) /
          static_cast<double>(report_out.detection_events.size());

    // Exact pass probability of a checked round with one or both halves
    // attacked. The fraction-1/2 mixture is 1/4 none + 1/2 one + 1/4 both.
    auto pass_at = [&](double fraction) {
      adversary::AdversarySpec spec = config.adversary;
      spec.attack_fraction = fraction;
      const auto a = adversary::stream_pair_analytics(spec);
      double pass = 0.0;
      for (std::size_t s = 0; s < 4; ++s) pass += 0.25 * a.transition[s][s];
      return pass;
    };
    const double pass_both = pass_at(1.0);
    const double pass_one = (pass_at(0.5) - 0.25 - 0.25 * pass_both) / 0.5;
    double escape = 1.0;
    for (std::size_t k = 0; k < rounds; ++k)
      if (halves_attacked[k] > 0 && is_check[k]) escape *= halves_attacked[k] == 2 ? pass_both : pass_one;
    report_out.analytic_escape = escape;
    const auto averaged = adversary::stream_pair_analytics(config.adversary);
    report_out.eve_information = averaged.info_ae;
    result.attack = std::move(report_out);
  }

  detail::finish_qkd_metrics(result, detail::symbol_information(key_a, key_b, 4));
  result.transcript = link.take_transcript();
  return result;
}

}  // namespace orthosim::protocols
