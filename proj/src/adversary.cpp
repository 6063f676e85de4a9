#include "orthosim/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "orthosim/error.hpp"

namespace orthosim::adversary {

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::none: return "none";
    case Strategy::glt_intercept_resend: return "glt-intercept-resend";
    case Strategy::intercept_resend: return "intercept-resend";
    case Strategy::probe: return "probe";
  }
  return "?";
}

const char* to_string(Basis b) {
  switch (b) {
    case Basis::z: return "z";
    case Basis::x: return "x";
    case Basis::random: return "random";
  }
  return "?";
}

// ------------------------------------------------------------------ GLT

GltInterception glt_intercept_resend(const gpt::GptState& carrier, Rng& rng) {
  const std::size_t fiducial = rng.below(carrier.spec().fiducials);
  auto m = gpt::measure_fiducial(carrier, fiducial, rng);
  return {fiducial, m.outcome, std::move(m.post)};
}

double detection_probability(std::size_t fiducials, std::size_t outcomes) {
  gpt::FiducialSpec{fiducials, outcomes}.validate();
  const double j = static_cast<double>(fiducials);
  const double k = static_cast<double>(outcomes);
  return (j - 1.0) / j * (k - 1.0) / k;
}

double escape_probability(std::size_t fiducials, std::size_t outcomes, std::size_t n) {
  return escape_probability(fiducials, outcomes, n, 1.0);
}

double escape_probability(std::size_t fiducials, std::size_t outcomes, std::size_t n, double check_fraction) {
  if (!(check_fraction >= 0.0 && check_fraction <= 1.0))
    throw InvalidSpec("escape_probability: check fraction outside [0,1]");
  const double per_gbit = 1.0 - check_fraction * detection_probability(fiducials, outcomes);
  return std::pow(per_gbit, static_cast<double>(n));
}

GltInterceptor::GltInterceptor(Rng rng, double attack_fraction) : rng_(rng), attack_fraction_(attack_fraction) {}

bool GltInterceptor::intercept(transport::Carrier& carrier, transport::TransitContext& context) {
  auto* state = std::get_if<gpt::GptState>(&carrier);
  if (state == nullptr) throw InvalidSpec("glt intercept-resend: carrier is not a gbit");
  if (!rng_.bernoulli(attack_fraction_)) return false;
  auto result = glt_intercept_resend(*state, rng_);
  log_.push_back({context.transit_index, result.fiducial, result.outcome});
  *state = std::move(result.forwarded);
  return true;
}

// -------------------------------------------------------------- quantum

QuantumInterception quantum_intercept_resend(quantum::QuantumRegistry& registry, quantum::ParticleId particle,
                                             Basis basis, Rng& rng) {
  quantum::MeasurementBasis b = quantum::MeasurementBasis::z;
  if (basis == Basis::x) b = quantum::MeasurementBasis::x;
  if (basis == Basis::random) b = rng.bit() ? quantum::MeasurementBasis::x : quantum::MeasurementBasis::z;
  const int outcome = registry.measure(particle, b, rng);
  return {b, outcome};
}

quantum::ParticleId probe_attack(quantum::QuantumRegistry& registry, quantum::ParticleId particle,
                                 const quantum::ProbeAttackSpec& spec) {
  return registry.attach_probe(particle, spec);
}

QuantumInterceptor::QuantumInterceptor(Rng rng, double attack_fraction, Basis basis)
    : rng_(rng), attack_fraction_(attack_fraction), basis_(basis) {}

bool QuantumInterceptor::intercept(transport::Carrier& carrier, transport::TransitContext& context) {
  auto* id = std::get_if<quantum::ParticleId>(&carrier);
  if (id == nullptr || context.registry == nullptr)
    throw InvalidSpec("quantum intercept-resend: carrier is not a quantum particle");
  if (!rng_.bernoulli(attack_fraction_)) return false;
  log_.push_back({context.transit_index, *id, quantum_intercept_resend(*context.registry, *id, basis_, rng_)});
  return true;
}

ProbeInterceptor::ProbeInterceptor(Rng rng, double attack_fraction, quantum::ProbeAttackSpec spec)
    : rng_(rng), attack_fraction_(attack_fraction), spec_(std::move(spec)) {
  spec_.validate();
}

bool ProbeInterceptor::intercept(transport::Carrier& carrier, transport::TransitContext& context) {
  auto* id = std::get_if<quantum::ParticleId>(&carrier);
  if (id == nullptr || context.registry == nullptr) throw InvalidSpec("probe attack: carrier is not a quantum particle");
  if (!rng_.bernoulli(attack_fraction_)) return false;
  log_.push_back({context.transit_index, *id, probe_attack(*context.registry, *id, spec_)});
  return true;
}

// ------------------------------------------------------ permutation attack

std::uint64_t pairing_count(std::size_t pairs) {
  // (2N-1)!! = (2N)! / (2^N N!)
  std::uint64_t count = 1;
  for (std::size_t k = 1; k <= pairs; ++k) {
    const std::uint64_t factor = 2 * k - 1;
    if (count > UINT64_MAX / factor) throw ResourceLimit("pairing_count: overflow");
    count *= factor;
  }
  return count;
}

namespace {
void extend_matchings(std::vector<bool>& used, std::vector<std::pair<std::size_t, std::size_t>>& current,
                      std::vector<std::vector<std::pair<std::size_t, std::size_t>>>& out) {
  const auto first = static_cast<std::size_t>(std::find(used.begin(), used.end(), false) - used.begin());
  if (first == used.size()) {
    out.push_back(current);
    return;
  }
  used[first] = true;
  for (std::size_t j = first + 1; j < used.size(); ++j) {
    if (used[j]) continue;
    used[j] = true;
    current.emplace_back(first, j);
    extend_matchings(used, current, out);
    current.pop_back();
    used[j] = false;
  }
  used[first] = false;
}
}  // namespace

std::vector<std::vector<std::pair<std::size_t, std::size_t>>> enumerate_pairings(std::size_t pairs) {
  if (pairs > 7) throw ResourceLimit("enumerate_pairings: more than 7 pairs");
  std::vector<bool> used(2 * pairs, false);
  std::vector<std::pair<std::size_t, std::size_t>> current;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> out;
  extend_matchings(used, current, out);
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> random_pairing(std::size_t pairs, Rng& rng) {
  // A uniform ordering of 2N items, read off two at a time, is a uniform
  // matching: every matching has exactly 2^N N! orderings.
  std::vector<std::size_t> order(2 * pairs);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);
  std::vector<std::pair<std::size_t, std::size_t>> matching;
  for (std::size_t k = 0; k < pairs; ++k) {
    auto a = order[2 * k];
    auto b = order[2 * k + 1];
    matching.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(matching.begin(), matching.end());
  return matching;
}

AttackReport permutation_attack(std::span<const std::size_t> partner, Rng& rng, std::optional<double> theta) {
  if (partner.size() % 2 != 0) throw InvalidSpec("permutation_attack: odd number of particles in the paired segment");
  for (std::size_t i = 0; i < partner.size(); ++i)
    if (partner[i] >= partner.size() || partner[partner[i]] != i || partner[i] == i)
      throw InvalidSpec("permutation_attack: partner map is not a perfect matching");

  const std::size_t pairs = partner.size() / 2;
  AttackReport report;
  report.strategy = "permutation-guess";
  report.rounds_attacked = pairs;
  PairingGuess guess;
  guess.pairs = pairs;
  guess.matchings = pairing_count(pairs);
  guess.success_probability = 1.0 / static_cast<double>(guess.matchings);
  guess.success = true;
  for (const auto& [a, b] : random_pairing(pairs, rng))
    if (partner[a] != b) guess.success = false;
  report.pairing = guess;
  if (theta && pairs >= 1 && pairs <= 3)
    report.eve_information = permutation_ignorance_holevo(*theta, pairs) / static_cast<double>(pairs);
  return report;
}

}  // namespace orthosim::adversary
