#include <bit>
#include <memory>
#include <numeric>

#include "orthosim/error.hpp"
#include "protocol_common.hpp"

namespace orthosim::protocols {

namespace {

using quantum::ParticleId;
using transport::Carrier;
using transport::Party;
using transport::Permutation;

struct Singlet {
  ParticleId a;
  ParticleId b;
};

std::unique_ptr<transport::CarrierInterceptor> make_eve(const adversary::AdversarySpec& adv, Rng eve_rng) {
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

std::vector<ParticleId> attacked_particles(const transport::CarrierInterceptor* eve) {
  std::vector<ParticleId> out;
  if (auto* q = dynamic_cast<const adversary::QuantumInterceptor*>(eve))
    for (const auto& r : q->log()) out.push_back(r.particle);
  if (auto* p = dynamic_cast<const adversary::ProbeInterceptor*>(eve))
    for (const auto& r : p->log()) out.push_back(r.particle);
  return out;
}

std::vector<std::size_t> offset(const std::vector<std::size_t>& indices, std::size_t by) {
  std::vector<std::size_t> out;
  for (auto i : indices) out.push_back(i + by);
  return out;
}

// Bob's half of a disclosure: the particles in the listed slots, in order.
std::vector<ParticleId> disclosed(const std::vector<Carrier>& received, const transport::ClassicalMessage& m) {
  std::vector<ParticleId> out;
  for (const auto& [source, carrier] : transport::unscramble_partial<Carrier>(received, m))
    out.push_back(std::get<ParticleId>(carrier));
  return out;
}

}  // namespace

RunResult run_pop_qsdc(const ProtocolConfig& config) {
  config.require_valid();
  const std::size_t n = config.block_pairs;
  const double e0 = config.threshold();
  PartyRngs rng(config.seed);

  RunResult result;
  result.kind = ProtocolKind::pop_qsdc;
  result.threshold = e0;
  result.alice_payload = config.message;

  quantum::QuantumRegistry registry;
  auto eve = make_eve(config.adversary, rng.eve);
  transport::Link link(config.noise, rng.noise, &registry);

  // (a) 3N singlets; N of them, chosen before transmission, are check pairs.
  std::vector<Singlet> pairs;
  for (std::size_t k = 0; k < 3 * n; ++k) {
    auto [a, b] = registry.create_singlet();
    pairs.push_back({a, b});
  }
  const auto check_idx = sample_subset(3 * n, n, rng.alice);
  std::vector<Singlet> checks, retained;
  {
    std::vector<bool> is_check(3 * n, false);
    for (auto c : check_idx) is_check[c] = true;
    for (std::size_t k = 0; k < 3 * n; ++k) (is_check[k] ? checks : retained).push_back(pairs[k]);
  }

  // (b) Block 1: full check pairs (sources 0..2N-1) then the retained second
  // halves (sources 2N..4N-1), scrambled by a fresh permutation.
  std::vector<Carrier> block1;
  for (const auto& p : checks) {
    block1.emplace_back(p.a);
    block1.emplace_back(p.b);
  }
  for (const auto& p : retained) block1.emplace_back(p.b);
  const Permutation pi1 = Permutation::random(block1.size(), rng.alice);
  const auto received1 = link.send_block(Party::alice, std::move(block1), pi1, eve.get());
  link.classical_broadcast(Party::bob, {"ack", {static_cast<std::int64_t>(received1.size())}});

  // Eve's view of the full pairs, kept only to score her pairing guess.
  std::vector<std::size_t> full_slots;
  for (std::size_t slot = 0; slot < pi1.size(); ++slot)
    if (pi1.source_of(slot) < 2 * n) full_slots.push_back(slot);
  std::vector<std::size_t> partner(full_slots.size());
  for (std::size_t i = 0; i < full_slots.size(); ++i) {
    const std::size_t mate_slot = pi1.slot_of(pi1.source_of(full_slots[i]) ^ 1);
    partner[i] = static_cast<std::size_t>(std::find(full_slots.begin(), full_slots.end(), mate_slot) - full_slots.begin());
  }

  // (c) First check: Alice discloses where the check pairs sit.
  std::vector<std::size_t> check_sources(2 * n);
  std::iota(check_sources.begin(), check_sources.end(), std::size_t{0});
  const auto reveal1 =
      link.classical_broadcast(Party::alice, transport::reveal_positions(pi1, check_sources, "reveal-check-pairs"));
  auto bell_check = [&](const std::vector<ParticleId>& a_halves, const std::vector<ParticleId>& b_halves,
                        const std::string& topic) {
    std::vector<std::uint8_t> report;
    for (std::size_t k = 0; k < a_halves.size(); ++k)
      report.push_back(quantum::singlet_decoding(registry.bell_measure(a_halves[k], b_halves[k], rng.bob)).code());
    link.classical_broadcast(Party::bob, {topic, detail::to_data(detail::symbols_to_bits(report))});
    std::size_t errors = 0;
    for (auto s : report) errors += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(s)));
    return std::make_pair(report, errors);
  };

  const auto revealed = disclosed(received1, reveal1);
  std::vector<ParticleId> first_a, first_b;
  for (std::size_t k = 0; k < n; ++k) {
    first_a.push_back(revealed[2 * k]);
    first_b.push_back(revealed[2 * k + 1]);
  }
  const auto [report1, errors1] = bell_check(first_a, first_b, "check-report-1");
  std::vector<bool> check_error;
  for (auto s : report1) check_error.push_back(s != 0);
  std::vector<ParticleId> checked_particles;
  for (const auto& p : checks) checked_particles.insert(checked_particles.end(), {p.a, p.b});

  result.error_count = errors1;
  result.checked_units = n;
  result.error_rate = static_cast<double>(errors1) / static_cast<double>(2 * n);
  result.raw_bits = 2 * n;
  result.repetition_length = config.message.empty() ? 1 : metrics::repetition_length(e0);

  std::vector<std::uint8_t> sent_symbols, got_symbols;
  auto finish = [&]() {
    if (eve) {
      adversary::AttackReport report;
      Rng guess_rng(derive_seed(config.seed, 5));
      const auto attacked = attacked_particles(eve.get());
      if (config.adversary.strategy == adversary::Strategy::probe && config.adversary.attack_fraction == 1.0) {
        report = adversary::permutation_attack(partner, guess_rng, config.adversary.theta);
      } else {
        report = adversary::permutation_attack(partner, guess_rng);
      }
      report.strategy = adversary::to_string(config.adversary.strategy);
      report.rounds_attacked = attacked.size();
      for (std::size_t k = 0; k < checked_particles.size() / 2; ++k) {
        const bool hit = std::any_of(attacked.begin(), attacked.end(), [&](ParticleId p) {
          return p == checked_particles[2 * k] || p == checked_particles[2 * k + 1];
        });
        if (hit) report.detection_events.push_back(check_error[k]);
      }
      if (!report.detection_events.empty())
        report.empirical_detection =
            static_cast<double>(std::count(report.detection_events.begin(), report.detection_events.end(), true)) /
            static_cast<double>(report.detection_events.size());
      result.attack = std::move(report);
    }
    const auto info_ab = detail::symbol_information(sent_symbols, got_symbols, 4);
    result.metrics.info_ab = info_ab;
    const double info_ae = result.attack && result.attack->eve_information ? *result.attack->eve_information : 0.0;
    result.metrics.verdict = metrics::check_qsdc_condition(result.error_rate, e0, info_ab.value_or(0.0), info_ae, n);
    result.transcript = link.take_transcript();
    return result;
  };

  if (result.error_rate > e0) {
    result.outcome = Outcome::aborted;
    result.abort_reason = "first check: bit error rate exceeds e0";
    return finish();
  }

  // (d) Repetition-code the message (copy j of bit i at j*M + i), pad to 2N
  // bits and dense-code onto N randomly chosen retained first halves.
  const std::size_t m = config.message.size();
  const std::size_t r = result.repetition_length;
  std::vector<bool> coded = random_bits(2 * n, rng.alice);
  for (std::size_t j = 0; j < r && m > 0; ++j)
    for (std::size_t i = 0; i < m; ++i) coded[j * m + i] = config.message[i];
  const auto message_idx = sample_subset(2 * n, n, rng.alice);
  std::vector<std::size_t> spare_idx;
  {
    std::vector<bool> used(2 * n, false);
    for (auto i : message_idx) used[i] = true;
    for (std::size_t j = 0; j < 2 * n; ++j)
      if (!used[j]) spare_idx.push_back(j);
  }
  for (std::size_t t = 0; t < n; ++t) {
    const quantum::DenseBits bits{coded[2 * t], coded[2 * t + 1]};
    sent_symbols.push_back(bits.code());
    registry.apply_dense_code(retained[message_idx[t]].a, bits);
  }
  std::vector<Carrier> block2;
  for (const auto& p : retained) block2.emplace_back(p.a);
  const Permutation pi2 = Permutation::random(block2.size(), rng.alice);
  const auto received2 = link.send_block(Party::alice, std::move(block2), pi2, eve.get());
  link.classical_broadcast(Party::bob, {"ack", {static_cast<std::int64_t>(received2.size())}});

  // (e) Second check on the N unencoded retained pairs.
  const auto reveal_b = link.classical_broadcast(
      Party::alice, transport::reveal_positions(pi1, offset(spare_idx, 2 * n), "reveal-check-b"));
  const auto reveal_a =
      link.classical_broadcast(Party::alice, transport::reveal_positions(pi2, spare_idx, "reveal-check-a"));
  const auto spare_b = disclosed(received1, reveal_b);
  const auto spare_a = disclosed(received2, reveal_a);
  const auto [report2, errors2] = bell_check(spare_a, spare_b, "check-report-2");
  for (std::size_t k = 0; k < n; ++k) {
    checked_particles.insert(checked_particles.end(), {retained[spare_idx[k]].a, retained[spare_idx[k]].b});
    check_error.push_back(report2[k] != 0);
  }
  result.error_count += errors2;
  result.checked_units += n;
  result.error_rate = static_cast<double>(result.error_count) / static_cast<double>(4 * n);
  const double e2 = static_cast<double>(errors2) / static_cast<double>(2 * n);
  if (e2 > e0) {
    result.outcome = Outcome::aborted;
    result.abort_reason = "second check: bit error rate exceeds e0";
    return finish();
  }

  // Pairing of the message pairs, then Bob's dense decoding.
  const auto msg_b = link.classical_broadcast(
      Party::alice, transport::reveal_positions(pi1, offset(message_idx, 2 * n), "reveal-message-b"));
  const auto msg_a =
      link.classical_broadcast(Party::alice, transport::reveal_positions(pi2, message_idx, "reveal-message-a"));
  const auto halves_b = disclosed(received1, msg_b);
  const auto halves_a = disclosed(received2, msg_a);
  std::vector<bool> decoded;
  for (std::size_t t = 0; t < n; ++t) {
    const auto bits = quantum::singlet_decoding(registry.bell_measure(halves_a[t], halves_b[t], rng.bob));
    got_symbols.push_back(bits.code());
    decoded.push_back(bits.first);
    decoded.push_back(bits.second);
  }
  result.sifted_bits = 2 * n;

  std::vector<bool> message(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t ones = 0;
    for (std::size_t j = 0; j < r; ++j) ones += decoded[j * m + i] ? 1 : 0;
    message[i] = 2 * ones > r;
  }
  result.bob_payload = std::move(message);
  result.outcome = Outcome::completed;
  return finish();
}

}  // namespace orthosim::protocols
