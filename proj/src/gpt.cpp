#include "orthosim/gpt.hpp"

#include <cmath>
#include <string>

#include "orthosim/error.hpp"

namespace orthosim::gpt {

void FiducialSpec::validate() const {
  if (fiducials < 1) throw InvalidSpec("FiducialSpec: need at least one fiducial");
  if (outcomes < 2) throw InvalidSpec("FiducialSpec: need at least two outcomes");
}

GptState::GptState(FiducialSpec spec, std::vector<double> probs)
    : spec_(spec), probs_(std::move(probs)) {
  spec_.validate();
  if (probs_.size() != spec_.fiducials * spec_.outcomes)
    throw InvalidSpec("GptState: table size does not match J x K");
  for (std::size_t mu = 0; mu < spec_.fiducials; ++mu) {
    double sum = 0.0;
    for (std::size_t a = 0; a < spec_.outcomes; ++a) {
      double p = probs_[mu * spec_.outcomes + a];
      if (!(p >= 0.0 && p <= 1.0))
        throw InvalidSpec("GptState: probability outside [0,1] in row " + std::to_string(mu));
      sum += p;
    }
    if (std::abs(sum - 1.0) > kNormalizationTolerance)
      throw InvalidSpec("GptState: row " + std::to_string(mu) + " is not normalized");
  }
}

GptState GptState::maximally_mixed(FiducialSpec spec) {
  spec.validate();
  return GptState(spec, std::vector<double>(spec.fiducials * spec.outcomes,
                                            1.0 / static_cast<double>(spec.outcomes)));
}

double GptState::prob(std::size_t fiducial, std::size_t outcome) const {
  if (fiducial >= spec_.fiducials || outcome >= spec_.outcomes)
    throw InvalidSpec("GptState::prob: index out of range");
  return probs_[fiducial * spec_.outcomes + outcome];
}

std::span<const double> GptState::row(std::size_t fiducial) const {
  if (fiducial >= spec_.fiducials) throw InvalidSpec("GptState::row: invalid fiducial index");
  return std::span<const double>(probs_).subspan(fiducial * spec_.outcomes, spec_.outcomes);
}

bool GptState::is_pure() const {
  for (double p : probs_)
    if (p != 0.0 && p != 1.0) return false;
  return true;
}

bool GptState::approx_equal(const GptState& other, double tol) const {
  if (!(spec_ == other.spec_)) return false;
  for (std::size_t i = 0; i < probs_.size(); ++i)
    if (std::abs(probs_[i] - other.probs_[i]) > tol) return false;
  return true;
}

PureGbit::PureGbit(FiducialSpec spec, std::vector<std::size_t> assignment)
    : spec_(spec), assignment_(std::move(assignment)) {
  spec_.validate();
  if (assignment_.size() != spec_.fiducials)
    throw InvalidSpec("PureGbit: assignment length must equal the number of fiducials");
  for (std::size_t v : assignment_)
    if (v >= spec_.outcomes) throw InvalidSpec("PureGbit: outcome index out of range");
}

PureGbit PureGbit::codeword(FiducialSpec spec, bool bit) {
  spec.validate();
  return PureGbit(spec, std::vector<std::size_t>(spec.fiducials, bit ? spec.outcomes - 1 : 0));
}

PureGbit PureGbit::two_by_two(std::size_t index) {
  if (index > 3) throw InvalidSpec("PureGbit::two_by_two: index must be 0..3");
  return PureGbit(FiducialSpec{2, 2}, {index >> 1, index & 1});
}

GptState PureGbit::state() const { return gbit_pure(spec_, assignment_); }

GptState gbit_pure(const FiducialSpec& spec, std::span<const std::size_t> assignment) {
  spec.validate();
  if (assignment.size() != spec.fiducials)
    throw InvalidSpec("gbit_pure: assignment length must equal the number of fiducials");
  std::vector<double> probs(spec.fiducials * spec.outcomes, 0.0);
  for (std::size_t mu = 0; mu < spec.fiducials; ++mu) {
    if (assignment[mu] >= spec.outcomes) throw InvalidSpec("gbit_pure: outcome index out of range");
    probs[mu * spec.outcomes + assignment[mu]] = 1.0;
  }
  return GptState(spec, std::move(probs));
}

GptState mix(std::span<const GptState> states, std::span<const double> weights) {
  if (states.empty() || states.size() != weights.size())
    throw InvalidSpec("mix: need one weight per state");
  const FiducialSpec spec = states.front().spec();
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw InvalidSpec("mix: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > kNormalizationTolerance) throw InvalidSpec("mix: weights must sum to 1");

  std::vector<double> probs(spec.fiducials * spec.outcomes, 0.0);
  for (std::size_t s = 0; s < states.size(); ++s) {
    if (!(states[s].spec() == spec)) throw InvalidSpec("mix: states have different fiducial specs");
    auto table = states[s].table();
    for (std::size_t i = 0; i < probs.size(); ++i) probs[i] += weights[s] * table[i];
  }
  // Round-off can push a row sum a few ulps past 1; renormalize rows.
  for (std::size_t mu = 0; mu < spec.fiducials; ++mu) {
    double sum = 0.0;
    for (std::size_t a = 0; a < spec.outcomes; ++a) sum += probs[mu * spec.outcomes + a];
    for (std::size_t a = 0; a < spec.outcomes; ++a) {
      double& p = probs[mu * spec.outcomes + a];
      p = std::min(1.0, p / sum);
    }
  }
  return GptState(spec, std::move(probs));
}

GptState embed_qubit(PauliEigenstate eigenstate) {
  std::vector<double> probs(6, 0.5);
  std::size_t axis = 0;
  bool down = false;
  switch (eigenstate) {
    case PauliEigenstate::x_up: axis = kQubitX; break;
    case PauliEigenstate::x_down: axis = kQubitX; down = true; break;
    case PauliEigenstate::y_up: axis = kQubitY; break;
    case PauliEigenstate::y_down: axis = kQubitY; down = true; break;
    case PauliEigenstate::z_up: axis = kQubitZ; break;
    case PauliEigenstate::z_down: axis = kQubitZ; down = true; break;
  }
  probs[2 * axis] = down ? 0.0 : 1.0;
  probs[2 * axis + 1] = down ? 1.0 : 0.0;
  return GptState(FiducialSpec{3, 2}, std::move(probs));
}

FiducialMeasurement measure_fiducial(const GptState& state, std::size_t fiducial, Rng& rng) {
  const FiducialSpec& spec = state.spec();
  if (fiducial >= spec.fiducials) throw InvalidSpec("measure_fiducial: invalid fiducial index");

  auto row = state.row(fiducial);
  const double u = rng.uniform();
  std::size_t outcome = spec.outcomes - 1;
  double cumulative = 0.0;
  for (std::size_t a = 0; a < spec.outcomes; ++a) {
    cumulative += row[a];
    if (u < cumulative && row[a] > 0.0) {
      outcome = a;
      break;
    }
  }
  // Guard against falling through onto a zero-probability tail outcome.
  while (row[outcome] == 0.0 && outcome > 0) --outcome;

  const double uniform = 1.0 / static_cast<double>(spec.outcomes);
  std::vector<double> post(spec.fiducials * spec.outcomes, uniform);
  for (std::size_t a = 0; a < spec.outcomes; ++a)
    post[fiducial * spec.outcomes + a] = (a == outcome) ? 1.0 : 0.0;
  return {outcome, GptState(spec, std::move(post))};
}

std::optional<std::size_t> distinguishing_fiducial(const PureGbit& a, const PureGbit& b) {
  if (!(a.spec() == b.spec())) throw InvalidSpec("distinguishing_fiducial: spec mismatch");
  for (std::size_t mu = 0; mu < a.spec().fiducials; ++mu)
    if (a.assignment()[mu] != b.assignment()[mu]) return mu;
  return std::nullopt;
}

PrBoxOutputs pr_box_sample(bool x, bool y, Rng& rng) {
  const bool a = rng.bit();
  return {a, a != (x && y)};
}

}  // namespace orthosim::gpt
