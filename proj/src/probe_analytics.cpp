// Exact density-matrix analytics for the probe and intercept-resend attacks.

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>

#include "orthosim/adversary.hpp"
#include "orthosim/error.hpp"
#include "orthosim/metrics.hpp"

namespace orthosim::adversary {

using quantum::DensityMatrix;
using quantum::StateVector;

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

quantum::ProbeAttackSpec probe_spec(double theta) {
  quantum::ProbeAttackSpec spec;
  spec.theta = std::clamp(theta, 0.0, kHalfPi);
  spec.validate();
  return spec;
}

DensityMatrix probe_state_for_bit(bool bit, double theta) {
  const StateVector joint = quantum::probe_interact(StateVector::basis(1, bit ? 1 : 0), probe_spec(theta));
  const std::size_t keep[] = {1};
  return quantum::partial_trace(joint.density(), keep);
}

StateVector encoded_singlet(std::uint8_t symbol) {
  return quantum::dense_encode(quantum::DenseBits::from_code(symbol), quantum::singlet(), 0);
}

// Bob decodes Bell outcomes of qubits (0, 1) of rho into symbols.
std::array<double, 4> decoded_distribution(const DensityMatrix& pair) {
  std::array<double, 4> out{};
  for (std::uint8_t k = 0; k < 4; ++k) {
    const auto outcome = static_cast<quantum::BellOutcome>(k);
    const StateVector b = quantum::bell_state(outcome);
    Eigen::Map<const Eigen::VectorXcd> v(b.amplitudes().data(), 4);
    const double p = (v.adjoint() * pair.matrix() * v)(0, 0).real();
    out[quantum::singlet_decoding(outcome).code()] += std::max(0.0, p);
  }
  return out;
}

double classical_mi(const std::vector<std::vector<double>>& joint) {
  std::vector<double> row(joint.size(), 0.0), col(joint.front().size(), 0.0), all;
  for (std::size_t a = 0; a < joint.size(); ++a)
    for (std::size_t b = 0; b < joint[a].size(); ++b) {
      row[a] += joint[a][b];
      col[b] += joint[a][b];
      all.push_back(joint[a][b]);
    }
  return std::max(0.0, metrics::shannon_entropy(row) + metrics::shannon_entropy(col) - metrics::shannon_entropy(all));
}

// Projective measurement of one qubit in Z or X without recording the outcome.
Eigen::MatrixXcd dephase(const Eigen::MatrixXcd& rho, std::size_t qubit, std::size_t n, bool x_basis) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
  for (int k = 0; k < 2; ++k) {
    quantum::Gate proj = quantum::Gate::Zero();
    proj(k, k) = 1.0;
    if (x_basis) proj = quantum::gates::hadamard() * proj * quantum::gates::hadamard();
    const Eigen::MatrixXcd p = quantum::embed_operator(proj, qubit, n);
    out += p * rho * p;
  }
  return out;
}

// Eve's outcome distribution when she measures the listed qubits of rho.
std::vector<double> outcome_distribution(const Eigen::MatrixXcd& rho, const std::vector<std::size_t>& qubits,
                                         const std::vector<bool>& x_basis, std::size_t n) {
  Eigen::MatrixXcd rotated = rho;
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    if (!x_basis[i]) continue;
    const Eigen::MatrixXcd h = quantum::embed_operator(quantum::gates::hadamard(), qubits[i], n);
    rotated = h * rotated * h;
  }
  std::vector<double> dist(std::size_t{1} << qubits.size(), 0.0);
  for (Eigen::Index idx = 0; idx < rotated.rows(); ++idx) {
    std::size_t key = 0;
    for (std::size_t i = 0; i < qubits.size(); ++i)
      if (static_cast<std::size_t>(idx) & (std::size_t{1} << qubits[i])) key |= std::size_t{1} << i;
    dist[key] += std::max(0.0, rotated(idx, idx).real());
  }
  return dist;
}

void finish(PairAnalytics& a) {
  std::vector<std::vector<double>> joint(4, std::vector<double>(4));
  double errors = 0.0;
  for (std::size_t s = 0; s < 4; ++s)
    for (std::size_t b = 0; b < 4; ++b) {
      joint[s][b] = 0.25 * a.transition[s][b];
      errors += 0.25 * a.transition[s][b] * std::popcount(s ^ b);
    }
  a.bit_error_rate = errors / 2.0;
  a.info_ab = classical_mi(joint);
}

PairAnalytics intercept_resend_analytics(const AdversarySpec& adv) {
  // Per particle: untouched, measured in Z, or measured in X.
  const double pz = adv.basis == Basis::z ? 1.0 : adv.basis == Basis::x ? 0.0 : 0.5;
  const std::array<double, 3> action_weight = {1.0 - adv.attack_fraction, adv.attack_fraction * pz,
                                               adv.attack_fraction * (1.0 - pz)};
  PairAnalytics out;
  double eve_info = 0.0;
  for (int act0 = 0; act0 < 3; ++act0)
    for (int act1 = 0; act1 < 3; ++act1) {
      const double weight = action_weight[act0] * action_weight[act1];
      if (weight == 0.0) continue;
      std::vector<std::size_t> measured;
      std::vector<bool> x_basis;
      if (act0) measured.push_back(0), x_basis.push_back(act0 == 2);
      if (act1) measured.push_back(1), x_basis.push_back(act1 == 2);
      std::vector<std::vector<double>> eve_joint;
      for (std::uint8_t s = 0; s < 4; ++s) {
        Eigen::MatrixXcd rho = encoded_singlet(s).density().matrix();
        if (!measured.empty()) {
          auto dist = outcome_distribution(rho, measured, x_basis, 2);
          for (auto& p : dist) p *= 0.25;
          eve_joint.push_back(std::move(dist));
        }
        for (std::size_t i = 0; i < measured.size(); ++i) rho = dephase(rho, measured[i], 2, x_basis[i]);
        const auto bob = decoded_distribution(DensityMatrix(2, (rho + rho.adjoint()) / 2.0));
        for (std::size_t b = 0; b < 4; ++b) out.transition[s][b] += weight * bob[b];
      }
      if (!eve_joint.empty()) eve_info += weight * classical_mi(eve_joint);
    }
  out.info_ae = eve_info;
  finish(out);
  return out;
}

PairAnalytics probe_analytics(const AdversarySpec& adv) {
  const auto spec = probe_spec(adv.theta);
  const double f = adv.attack_fraction;
  PairAnalytics out;
  double eve_info = 0.0;
  for (int pattern = 0; pattern < 4; ++pattern) {
    const bool on0 = pattern & 1;
    const bool on1 = pattern & 2;
    const double weight = (on0 ? f : 1.0 - f) * (on1 ? f : 1.0 - f);
    if (weight == 0.0) continue;
    std::vector<quantum::EnsembleMember> ensemble;
    for (std::uint8_t s = 0; s < 4; ++s) {
      StateVector joint = encoded_singlet(s);
      if (on0) joint = quantum::probe_interact(joint, spec, 0);
      if (on1) joint = quantum::probe_interact(joint, spec, 1);
      const DensityMatrix rho = joint.density();
      const std::size_t pair_qubits[] = {0, 1};
      const auto bob = decoded_distribution(quantum::partial_trace(rho, pair_qubits));
      for (std::size_t b = 0; b < 4; ++b) out.transition[s][b] += weight * bob[b];
      if (joint.num_qubits() > 2) {
        std::vector<std::size_t> probes;
        for (std::size_t q = 2; q < joint.num_qubits(); ++q) probes.push_back(q);
        ensemble.push_back({0.25, quantum::partial_trace(rho, probes)});
      }
    }
    if (!ensemble.empty()) eve_info += weight * quantum::holevo_information(ensemble);
  }
  out.info_ae = eve_info;
  finish(out);
  return out;
}

}  // namespace

SweepPoint probe_sweep_point(double theta) {
  const auto spec = probe_spec(theta);
  SweepPoint point;
  point.theta = theta;

  // Check state |+>, Bob measures X after the interaction.
  StateVector plus(1);
  plus.apply(quantum::gates::hadamard(), 0);
  const StateVector joint = quantum::probe_interact(plus, spec);
  const std::size_t system[] = {0};
  const DensityMatrix rho = quantum::partial_trace(joint.density(), system);
  const double minus_prob = 0.5 * (rho.matrix()(0, 0) + rho.matrix()(1, 1) - rho.matrix()(0, 1) - rho.matrix()(1, 0)).real();
  point.error_rate = std::clamp(minus_prob, 0.0, 1.0);
  point.info_ab = 1.0 - metrics::binary_entropy(point.error_rate);

  const quantum::EnsembleMember ensemble[] = {{0.5, probe_state_for_bit(false, theta)},
                                              {0.5, probe_state_for_bit(true, theta)}};
  point.info_ae = quantum::holevo_information(ensemble);
  return point;
}

std::vector<SweepPoint> probe_sweep(std::size_t points) {
  if (points < 2) throw InvalidSpec("probe_sweep: need at least two grid points");
  std::vector<SweepPoint> out;
  for (std::size_t k = 0; k < points; ++k)
    out.push_back(probe_sweep_point(kHalfPi * static_cast<double>(k) / static_cast<double>(points - 1)));
  return out;
}

Crossing calibrate_crossing(double tolerance) {
  auto gap = [](double theta) {
    const auto p = probe_sweep_point(theta);
    return p.info_ab - p.info_ae;
  };
  double lo = 0.0;
  double hi = kHalfPi;
  if (!(gap(lo) > 0.0 && gap(hi) < 0.0)) throw InvalidSpec("calibrate_crossing: gap does not change sign");
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) > 0.0 ? lo : hi) = mid;
  }
  const double theta = 0.5 * (lo + hi);
  const auto p = probe_sweep_point(theta);
  return {theta, p.error_rate, p.info_ab - p.info_ae};
}

PairAnalytics stream_pair_analytics(const AdversarySpec& adversary) {
  switch (adversary.strategy) {
    case Strategy::intercept_resend: return intercept_resend_analytics(adversary);
    case Strategy::probe: return probe_analytics(adversary);
    case Strategy::none: {
      PairAnalytics out;
      for (std::size_t s = 0; s < 4; ++s) out.transition[s][s] = 1.0;
      finish(out);
      return out;
    }
    case Strategy::glt_intercept_resend: break;
  }
  throw InvalidSpec("stream_pair_analytics: strategy does not act on quantum carriers");
}

DensityMatrix pair_probe_state(std::uint8_t symbol, double theta) {
  if (symbol > 3) throw InvalidSpec("pair_probe_state: symbol must be 0..3");
  const auto spec = probe_spec(theta);
  StateVector joint = quantum::probe_interact(encoded_singlet(symbol), spec, 0);
  joint = quantum::probe_interact(joint, spec, 1);
  const std::size_t probes[] = {2, 3};
  return quantum::partial_trace(joint.density(), probes);
}

namespace {

double enumerate_ignorance_holevo(double theta, std::size_t pairs) {

  std::array<Eigen::MatrixXcd, 4> pair_states;
  for (std::uint8_t s = 0; s < 4; ++s) pair_states[s] = pair_probe_state(s, theta).matrix();

  const std::size_t qubits = 2 * pairs;
  const std::size_t dim = std::size_t{1} << qubits;

  // All orderings of the 2N probes as index remaps on the 2^(2N) basis.
  std::vector<std::size_t> order(qubits);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::vector<std::size_t>> remaps;
  do {
    std::vector<std::size_t> remap(dim);
    for (std::size_t idx = 0; idx < dim; ++idx) {
      std::size_t out = 0;
      for (std::size_t q = 0; q < qubits; ++q)
        if (idx & (std::size_t{1} << q)) out |= std::size_t{1} << order[q];
      remap[idx] = out;
    }
    remaps.push_back(std::move(remap));
  } while (std::next_permutation(order.begin(), order.end()));

  // The averaged state depends only on the multiset of symbols, so enumerate
  // nondecreasing symbol tuples and weight by their number of orderings.
  std::vector<quantum::EnsembleMember> ensemble;
  std::vector<std::uint8_t> symbols(pairs, 0);
  const double messages = std::pow(4.0, static_cast<double>(pairs));
  while (true) {
    Eigen::MatrixXcd product = Eigen::MatrixXcd::Identity(1, 1);
    // Pair k occupies qubits 2k, 2k+1; Kronecker order puts pair 0 lowest.
    for (std::size_t k = pairs; k-- > 0;) {
      const Eigen::MatrixXcd& f = pair_states[symbols[k]];
      Eigen::MatrixXcd next(product.rows() * 4, product.cols() * 4);
      for (Eigen::Index r = 0; r < product.rows(); ++r)
        for (Eigen::Index c = 0; c < product.cols(); ++c) next.block(4 * r, 4 * c, 4, 4) = product(r, c) * f;
      product = std::move(next);
    }
    Eigen::MatrixXcd averaged = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (const auto& remap : remaps)
      for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c)
          averaged(static_cast<Eigen::Index>(remap[r]), static_cast<Eigen::Index>(remap[c])) +=
              product(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    averaged /= static_cast<double>(remaps.size());
    averaged = (averaged + averaged.adjoint()) / 2.0;

    double orderings = std::tgamma(static_cast<double>(pairs) + 1.0);
    for (std::uint8_t s = 0; s < 4; ++s) {
      const auto c = std::count(symbols.begin(), symbols.end(), s);
      orderings /= std::tgamma(static_cast<double>(c) + 1.0);
    }
    ensemble.push_back({orderings / messages, DensityMatrix(qubits, std::move(averaged))});

    // Next nondecreasing tuple.
    std::size_t pos = pairs;
    while (pos > 0 && symbols[pos - 1] == 3) --pos;
    if (pos == 0) break;
    const std::uint8_t v = symbols[pos - 1] + 1;
    for (std::size_t k = pos - 1; k < pairs; ++k) symbols[k] = v;
  }
  return quantum::holevo_information(ensemble);
}

}  // namespace

double permutation_ignorance_holevo(double theta, std::size_t pairs) {
  if (pairs == 0) throw InvalidSpec("permutation_ignorance_holevo: need at least one pair");
  if (pairs > 3) throw ResourceLimit("permutation_ignorance_holevo: exact enumeration limited to 3 pairs");
  // Per-trial attack reports ask for the same few (theta, N) values repeatedly.
  static std::mutex mutex;
  static std::map<std::pair<double, std::size_t>, double> cache;
  const std::lock_guard lock(mutex);
  const auto key = std::make_pair(theta, pairs);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  return cache[key] = enumerate_ignorance_holevo(theta, pairs);
}

}  // namespace orthosim::adversary
