#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <bit>
#include <map>
#include <set>

#include "oracles.hpp"
#include "orthosim/adversary.hpp"
#include "orthosim/error.hpp"

using namespace orthosim;
using namespace orthosim::adversary;
using std::numbers::pi;

namespace {

// Permutation-averaged Holevo per pair from an independent numpy
// enumeration over all (2N)! probe orderings and 4^N messages.
struct FrozenBlock {
  double theta;
  double chi;   // N = 1
  double two;   // N = 2, total
  double three; // N = 3, total
};
const FrozenBlock kFrozen[] = {
    {pi / 8, 0.08881439227557669, 0.036451025111502555, 0.018667880251882485},
    {pi / 4, 0.3904739489265793, 0.26425220572374997, 0.15906607890309177},
    {pi / 2, 1.0, 1.1556390622295658, 1.1694522692135978},
};

// Closed forms for the single-qubit probe family.
double sweep_error(double t) { return (1 - std::cos(t)) / 2; }
double sweep_eve(double t) { return oracle::h2((1 + std::cos(t)) / 2); }

// Bob's symbol transition matrix and Eve's per-pair Holevo when both halves
// of a dense-coded singlet are probed, from the 16-dim oracle.
struct PairOracle {
  double transition[4][4];
  double bit_error;
  double eve;
};

PairOracle probe_pair_oracle(double theta) {
  PairOracle o{};
  std::vector<oracle::Mat> eve_states;
  double errors = 0;
  for (int s = 0; s < 4; ++s) {
    const oracle::Vec pair = oracle::on_q0(oracle::dense_op(s & 2, s & 1)) * oracle::singlet();
    const oracle::Vec v = oracle::probed_pair(pair, theta);
    const auto p = oracle::bell_distribution(oracle::reduce_low(v));
    for (int k = 0; k < 4; ++k) {
      const int b = oracle::decode_symbol(k);
      o.transition[s][b] += p[k];
      errors += 0.25 * p[k] * std::popcount(static_cast<unsigned>(s ^ b));
    }
    eve_states.push_back(oracle::reduce_high(v));
  }
  o.bit_error = errors / 2;
  o.eve = oracle::holevo(eve_states);
  return o;
}

// Both halves measured in `basis` (0 = Z, 1 = X) and resent.
double intercept_bit_error(int basis0, int basis1) {
  double errors = 0;
  for (int s = 0; s < 4; ++s) {
    const oracle::Vec pair = oracle::on_q0(oracle::dense_op(s & 2, s & 1)) * oracle::singlet();
    oracle::Mat rho = pair * pair.adjoint();
    for (int q = 0; q < 2; ++q) {
      const int basis = q == 0 ? basis0 : basis1;
      oracle::Mat out = oracle::Mat::Zero(4, 4);
      for (int k = 0; k < 2; ++k) {
        oracle::Mat proj = oracle::Mat::Zero(2, 2);
        proj(k, k) = 1;
        if (basis) proj = oracle::Hd() * proj * oracle::Hd();
        const oracle::Mat p = q == 0 ? oracle::on_q0(proj) : oracle::on_q1(proj);
        out += p * rho * p;
      }
      rho = out;
    }
    const auto dist = oracle::bell_distribution(rho);
    for (int k = 0; k < 4; ++k)
      errors += 0.25 * dist[k] * std::popcount(static_cast<unsigned>(s ^ oracle::decode_symbol(k)));
  }
  return errors / 2;
}

}  // namespace

// ----------------------------------------------------------------- GLT

TEST(GltAttack, XOnG0RevealsZeroAndUniformizesZ) {
  Rng rng(1);
  const auto g0 = gpt::PureGbit::two_by_two(0).state();
  for (int i = 0; i < 20; ++i) {
    GltInterception r = glt_intercept_resend(g0, rng);
    EXPECT_EQ(r.outcome, 0u);
    const std::size_t other = 1 - r.fiducial;
    EXPECT_DOUBLE_EQ(r.forwarded.prob(other, 0), 0.5);
    EXPECT_DOUBLE_EQ(r.forwarded.prob(r.fiducial, 0), 1.0);
  }
}

TEST(GltAttack, G3AlwaysReadsOne) {
  Rng rng(2);
  const auto g3 = gpt::PureGbit::two_by_two(3).state();
  for (int i = 0; i < 20; ++i) EXPECT_EQ(glt_intercept_resend(g3, rng).outcome, 1u);
}

TEST(GltAttack, FiducialChoiceUniform) {
  Rng rng(3);
  const gpt::FiducialSpec spec{4, 2};
  std::vector<int> counts(4, 0);
  const int n = 40000;
  for (int i = 0; i < n; ++i) ++counts[glt_intercept_resend(gpt::PureGbit::codeword(spec, false).state(), rng).fiducial];
  for (int c : counts) EXPECT_NEAR(c, n / 4.0, 5 * std::sqrt(n * 0.25 * 0.75));
}

TEST(GltAttack, InterceptorRejectsQubits) {
  GltInterceptor eve(Rng(0), 1.0);
  transport::Carrier c = quantum::ParticleId{0};
  transport::TransitContext ctx;
  EXPECT_THROW(eve.intercept(c, ctx), InvalidSpec);
}

TEST(EscapeProbability, PaperValues) {
  EXPECT_DOUBLE_EQ(escape_probability(2, 2, 1), 0.75);
  EXPECT_NEAR(escape_probability(3, 2, 1), 2.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(escape_probability(4, 4, 0), 1.0);
  EXPECT_NEAR(escape_probability(2, 2, 10), std::pow(0.75, 10), 1e-15);
  EXPECT_NEAR(escape_probability(2, 2, 3, 0.5), std::pow(1 - 0.5 * 0.25, 3), 1e-15);
  EXPECT_THROW(escape_probability(0, 2, 1), InvalidSpec);
  EXPECT_THROW(escape_probability(2, 1, 1), InvalidSpec);
}

TEST(EscapeProbability, DetectionDecomposition) {
  // Bob's fiducial differs from Eve's with (J-1)/J; then the uniformized row
  // mismatches with (K-1)/K.
  for (std::size_t j = 2; j <= 4; ++j)
    for (std::size_t k = 2; k <= 4; ++k) {
      Rng rng(100 * j + k);
      const gpt::FiducialSpec spec{j, k};
      const auto code = gpt::PureGbit::codeword(spec, false).state();
      int differ = 0, detect = 0, detect_given_differ = 0;
      const int n = 40000;
      for (int i = 0; i < n; ++i) {
        const auto eve = glt_intercept_resend(code, rng);
        const auto bob_f = rng.below(j);
        const auto bob = gpt::measure_fiducial(eve.forwarded, bob_f, rng);
        const bool d = bob.outcome != 0;
        detect += d;
        if (bob_f != eve.fiducial) {
          ++differ;
          detect_given_differ += d;
        } else {
          EXPECT_FALSE(d);
        }
      }
      const double pd = (j - 1.0) / j, pk = (k - 1.0) / k;
      EXPECT_NEAR(differ / double(n), pd, 5 * std::sqrt(pd * (1 - pd) / n));
      EXPECT_NEAR(detect_given_differ / double(differ), pk, 5 * std::sqrt(pk * (1 - pk) / differ));
      EXPECT_NEAR(detect / double(n), detection_probability(j, k),
                  5 * std::sqrt(pd * pk * (1 - pd * pk) / n));
    }
}

// -------------------------------------------------------------- quantum

TEST(QuantumIntercept, ZOnZeroAndPlus) {
  Rng rng(4);
  quantum::QuantumRegistry reg;
  for (int i = 0; i < 20; ++i) {
    const auto p = reg.create(quantum::StateVector(1));
    const auto r = quantum_intercept_resend(reg, p, Basis::z, rng);
    EXPECT_EQ(r.outcome, 0);
    EXPECT_EQ(reg.measure(p, quantum::MeasurementBasis::z, rng), 0);
  }
  quantum::StateVector plus(1);
  plus.apply(quantum::gates::hadamard(), 0);
  int errors = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const auto p = reg.create(plus);
    quantum_intercept_resend(reg, p, Basis::z, rng);
    errors += reg.measure(p, quantum::MeasurementBasis::x, rng);
  }
  EXPECT_NEAR(errors / double(n), 0.5, 5 * std::sqrt(0.25 / n));
}

TEST(QuantumIntercept, SingletHalvesMatchOracle) {
  // Empirical Bell-check bit error on a noiseless undisturbed singlet with
  // both halves Z-measured, against the density-matrix oracle.
  Rng rng(5);
  quantum::QuantumRegistry reg;
  const int n = 100000;
  int bit_errors = 0;
  for (int i = 0; i < n; ++i) {
    auto [a, b] = reg.create_singlet();
    quantum_intercept_resend(reg, a, Basis::z, rng);
    quantum_intercept_resend(reg, b, Basis::z, rng);
    const auto code = quantum::singlet_decoding(reg.bell_measure(a, b, rng)).code();
    bit_errors += std::popcount(static_cast<unsigned>(code));
  }
  // For the unencoded singlet the symbol-0 row of the oracle applies.
  const oracle::Vec s = oracle::singlet();
  oracle::Mat rho = s * s.adjoint();
  oracle::Mat out = oracle::Mat::Zero(4, 4);
  for (int k0 = 0; k0 < 2; ++k0)
    for (int k1 = 0; k1 < 2; ++k1) {
      oracle::Mat p0 = oracle::Mat::Zero(2, 2), p1 = oracle::Mat::Zero(2, 2);
      p0(k0, k0) = 1;
      p1(k1, k1) = 1;
      const oracle::Mat p = oracle::kron(p1, p0);
      out += p * rho * p;
    }
  const auto dist = oracle::bell_distribution(out);
  double expected = 0;
  for (int k = 0; k < 4; ++k) expected += dist[k] * std::popcount(static_cast<unsigned>(oracle::decode_symbol(k)));
  expected /= 2;
  EXPECT_NEAR(expected, 0.25, 1e-12);
  const double sigma = std::sqrt(expected * (1 - expected) / (2.0 * n));
  EXPECT_NEAR(bit_errors / (2.0 * n), expected, 5 * sigma);
}

TEST(ProbeAttack, EndpointsAndMidpoint) {
  const auto zero = probe_sweep_point(0.0);
  EXPECT_NEAR(zero.error_rate, 0.0, 1e-15);
  EXPECT_NEAR(zero.info_ae, 0.0, 1e-12);
  EXPECT_NEAR(zero.info_ab, 1.0, 1e-12);
  const auto full = probe_sweep_point(pi / 2);
  EXPECT_NEAR(full.error_rate, 0.5, 1e-12);
  EXPECT_NEAR(full.info_ae, 1.0, 1e-12);
  const auto mid = probe_sweep_point(pi / 4);
  EXPECT_NEAR(mid.error_rate, sweep_error(pi / 4), 1e-9);
  EXPECT_NEAR(mid.info_ae, sweep_eve(pi / 4), 1e-9);
  EXPECT_GT(mid.error_rate, 0.0);
  EXPECT_LT(mid.error_rate, 0.5);
  EXPECT_GT(mid.info_ae, 0.0);
  EXPECT_LT(mid.info_ae, 1.0);
}

TEST(ProbeAttack, SweepMatchesClosedForm) {
  for (const auto& p : probe_sweep(33)) {
    EXPECT_NEAR(p.error_rate, sweep_error(p.theta), 1e-12);
    EXPECT_NEAR(p.info_ae, sweep_eve(p.theta), 1e-9);
    EXPECT_NEAR(p.info_ab, 1 - oracle::h2(sweep_error(p.theta)), 1e-9);
  }
  EXPECT_THROW(probe_sweep(1), InvalidSpec);
}

TEST(ProbeAttack, CalibratedCrossing) {
  const auto c = calibrate_crossing();
  EXPECT_LT(std::abs(c.gap), 1e-6);
  EXPECT_NEAR(c.error_threshold, kCalibratedThreshold, 1e-9);
  // At the crossing h(e0) = 1/2, so theta* = acos(1 - 2 e0).
  EXPECT_NEAR(oracle::h2(kCalibratedThreshold), 0.5, 1e-12);
  EXPECT_NEAR(c.theta, std::acos(1 - 2 * kCalibratedThreshold), 1e-9);
}

TEST(StreamPair, NoAttackIsIdentity) {
  const auto a = stream_pair_analytics({});
  EXPECT_EQ(a.bit_error_rate, 0.0);
  EXPECT_NEAR(a.info_ab, 2.0, 1e-12);
  EXPECT_EQ(a.info_ae, 0.0);
}

TEST(StreamPair, InterceptResendMatchesOracle) {
  AdversarySpec z{Strategy::intercept_resend, 1.0, Basis::z, 0.0};
  EXPECT_NEAR(stream_pair_analytics(z).bit_error_rate, intercept_bit_error(0, 0), 1e-12);
  EXPECT_NEAR(stream_pair_analytics(z).bit_error_rate, 0.25, 1e-12);
  AdversarySpec x{Strategy::intercept_resend, 1.0, Basis::x, 0.0};
  EXPECT_NEAR(stream_pair_analytics(x).bit_error_rate, intercept_bit_error(1, 1), 1e-12);
  AdversarySpec r{Strategy::intercept_resend, 1.0, Basis::random, 0.0};
  const double mixed = 0.25 * (intercept_bit_error(0, 0) + intercept_bit_error(0, 1) + intercept_bit_error(1, 0) +
                               intercept_bit_error(1, 1));
  EXPECT_NEAR(stream_pair_analytics(r).bit_error_rate, mixed, 1e-12);
  EXPECT_NEAR(mixed, 0.375, 1e-12);
}

TEST(StreamPair, ProbeMatchesOracle) {
  for (double theta : {0.0, pi / 8, 0.5, pi / 4, 1.2, pi / 2}) {
    const auto o = probe_pair_oracle(theta);
    const auto a = stream_pair_analytics({Strategy::probe, 1.0, Basis::z, theta});
    EXPECT_NEAR(a.bit_error_rate, o.bit_error, 1e-12) << theta;
    EXPECT_NEAR(a.bit_error_rate, std::pow(std::sin(theta), 2) / 4, 1e-12) << theta;
    EXPECT_NEAR(a.info_ae, o.eve, 1e-9) << theta;
    for (int s = 0; s < 4; ++s)
      for (int b = 0; b < 4; ++b) EXPECT_NEAR(a.transition[s][b], o.transition[s][b], 1e-12);
  }
}

TEST(StreamPair, ZeroFractionIsTransparent) {
  for (auto strategy : {Strategy::intercept_resend, Strategy::probe}) {
    const auto a = stream_pair_analytics({strategy, 0.0, Basis::random, 1.0});
    EXPECT_EQ(a.bit_error_rate, 0.0);
    EXPECT_EQ(a.info_ae, 0.0);
  }
  EXPECT_THROW(stream_pair_analytics({Strategy::glt_intercept_resend}), InvalidSpec);
}

// ---------------------------------------------------------- permutations

TEST(Pairings, CountMatchesEnumeration) {
  for (std::size_t n = 0; n <= 6; ++n) {
    const auto all = enumerate_pairings(n);
    EXPECT_EQ(all.size(), pairing_count(n)) << n;
    std::set<std::vector<std::pair<std::size_t, std::size_t>>> distinct(all.begin(), all.end());
    EXPECT_EQ(distinct.size(), all.size());
  }
  EXPECT_EQ(pairing_count(2), 3u);
  EXPECT_EQ(pairing_count(3), 15u);
}

TEST(Pairings, RandomPairingIsUniform) {
  Rng rng(6);
  std::map<std::vector<std::pair<std::size_t, std::size_t>>, int> counts;
  const int n = 60000;
  for (int i = 0; i < n; ++i) ++counts[random_pairing(3, rng)];
  ASSERT_EQ(counts.size(), 15u);
  const double p = 1.0 / 15;
  for (const auto& [k, c] : counts) EXPECT_NEAR(c / double(n), p, 5 * std::sqrt(p * (1 - p) / n));
}

TEST(PermutationAttackTest, SingleAndTwoPairs) {
  Rng rng(7);
  const std::size_t one[] = {1, 0};
  const auto r1 = permutation_attack(one, rng);
  EXPECT_EQ(r1.pairing->matchings, 1u);
  EXPECT_TRUE(r1.pairing->success);
  EXPECT_DOUBLE_EQ(r1.pairing->success_probability, 1.0);
  const std::size_t two[] = {2, 3, 0, 1};
  const auto r2 = permutation_attack(two, rng, pi / 4);
  EXPECT_EQ(r2.pairing->matchings, 3u);
  EXPECT_NEAR(r2.pairing->success_probability, 1.0 / 3, 1e-15);
  ASSERT_TRUE(r2.eve_information.has_value());
  EXPECT_NEAR(*r2.eve_information, kFrozen[1].two / 2, 1e-9);
}

TEST(PermutationAttackTest, RejectsBadPartnerMaps) {
  Rng rng(8);
  const std::size_t odd[] = {1, 0, 2};
  EXPECT_THROW(permutation_attack(odd, rng), InvalidSpec);
  const std::size_t not_involution[] = {1, 2, 3, 0};
  EXPECT_THROW(permutation_attack(not_involution, rng), InvalidSpec);
}

TEST(BlockAdvantage, MatchesFrozenEnumeration) {
  for (const auto& f : kFrozen) {
    EXPECT_NEAR(permutation_ignorance_holevo(f.theta, 1), f.chi, 1e-9);
    EXPECT_NEAR(permutation_ignorance_holevo(f.theta, 2), f.two, 1e-9);
    EXPECT_NEAR(permutation_ignorance_holevo(f.theta, 3), f.three, 1e-9);
  }
}

TEST(BlockAdvantage, StreamingHolevoEqualsSinglePairBlock) {
  for (const auto& f : kFrozen)
    EXPECT_NEAR(stream_pair_analytics({Strategy::probe, 1.0, Basis::z, f.theta}).info_ae, f.chi, 1e-9);
}

TEST(BlockAdvantage, ResourceGuard) {
  EXPECT_THROW(permutation_ignorance_holevo(0.3, 4), ResourceLimit);
  EXPECT_THROW(permutation_ignorance_holevo(0.3, 0), InvalidSpec);
}
