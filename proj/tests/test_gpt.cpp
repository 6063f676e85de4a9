#include <gtest/gtest.h>

#include "orthosim/error.hpp"
#include "orthosim/gpt.hpp"

using namespace orthosim;
using namespace orthosim::gpt;

namespace {
const FiducialSpec k2x2{2, 2};

GptState table(std::vector<double> probs, FiducialSpec spec = k2x2) { return GptState(spec, std::move(probs)); }
}  // namespace

TEST(FiducialSpecTest, Bounds) {
  EXPECT_NO_THROW((FiducialSpec{1, 2}.validate()));
  EXPECT_THROW((FiducialSpec{0, 2}.validate()), InvalidSpec);
  EXPECT_THROW((FiducialSpec{2, 1}.validate()), InvalidSpec);
}

TEST(GptStateTest, RejectsBadRows) {
  EXPECT_THROW(table({0.5, 0.6, 1, 0}), InvalidSpec);
  EXPECT_THROW(table({1.2, -0.2, 1, 0}), InvalidSpec);
  EXPECT_THROW(table({1, 0, 1}), InvalidSpec);
  EXPECT_NO_THROW(table({0.5, 0.5 + 5e-13, 1, 0}));
}

TEST(GptStateTest, ClassicalBitIsOneRow) {
  const GptState coin(FiducialSpec{1, 2}, {0.3, 0.7});
  EXPECT_DOUBLE_EQ(coin.prob(0, 1), 0.7);
  EXPECT_FALSE(coin.is_pure());
}

TEST(PureGbitTest, FourTwoByTwoStates) {
  // g0 = (X:0, Z:0), g1 = (X:0, Z:1), g2 = (X:1, Z:0), g3 = (X:1, Z:1).
  const std::vector<std::vector<double>> expected = {
      {1, 0, 1, 0}, {1, 0, 0, 1}, {0, 1, 1, 0}, {0, 1, 0, 1}};
  for (std::size_t i = 0; i < 4; ++i) {
    const auto s = PureGbit::two_by_two(i).state();
    EXPECT_TRUE(s.is_pure());
    EXPECT_EQ(std::vector<double>(s.table().begin(), s.table().end()), expected[i]) << "g" << i;
  }
  EXPECT_THROW(PureGbit::two_by_two(4), InvalidSpec);
}

TEST(PureGbitTest, CodewordsAreExtremeAssignments) {
  const FiducialSpec spec{3, 4};
  const auto zero = PureGbit::codeword(spec, false);
  const auto one = PureGbit::codeword(spec, true);
  for (auto a : zero.assignment()) EXPECT_EQ(a, 0u);
  for (auto a : one.assignment()) EXPECT_EQ(a, 3u);
  EXPECT_EQ(PureGbit::codeword(k2x2, false), PureGbit::two_by_two(0));
  EXPECT_EQ(PureGbit::codeword(k2x2, true), PureGbit::two_by_two(3));
}

TEST(PureGbitTest, RejectsOutOfRangeAssignment) {
  EXPECT_THROW(PureGbit(k2x2, {0, 2}), InvalidSpec);
  EXPECT_THROW(PureGbit(k2x2, {0}), InvalidSpec);
}

TEST(MixTest, XPlusIsMixtureOfG0AndG1) {
  const GptState g[] = {PureGbit::two_by_two(0).state(), PureGbit::two_by_two(1).state()};
  const double w[] = {0.5, 0.5};
  const auto m = mix(g, w);
  EXPECT_TRUE(m.approx_equal(table({1, 0, 0.5, 0.5})));
  const double bad[] = {0.5, 0.6};
  EXPECT_THROW(mix(g, bad), InvalidSpec);
}

TEST(QubitEmbedding, PauliEigenstates) {
  const auto up = embed_qubit(PauliEigenstate::z_up);
  EXPECT_DOUBLE_EQ(up.prob(kQubitZ, 0), 1.0);
  EXPECT_DOUBLE_EQ(up.prob(kQubitX, 0), 0.5);
  EXPECT_DOUBLE_EQ(up.prob(kQubitY, 1), 0.5);
  const auto ym = embed_qubit(PauliEigenstate::y_down);
  EXPECT_DOUBLE_EQ(ym.prob(kQubitY, 1), 1.0);
}

TEST(MeasureFiducial, DisturbanceRule) {
  // Measuring X on g2 returns 1 and leaves the Z row uniform.
  Rng rng(5);
  const auto m = measure_fiducial(PureGbit::two_by_two(2).state(), kGbitX, rng);
  EXPECT_EQ(m.outcome, 1u);
  EXPECT_TRUE(m.post.approx_equal(table({0, 1, 0.5, 0.5})));
}

TEST(MeasureFiducial, RepeatedMeasurementIsStable) {
  Rng rng(6);
  auto state = GptState::maximally_mixed(FiducialSpec{3, 3});
  const auto first = measure_fiducial(state, 1, rng);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(measure_fiducial(first.post, 1, rng).outcome, first.outcome);
}

TEST(MeasureFiducial, OutcomeFrequencies) {
  Rng rng(7);
  const GptState s(FiducialSpec{1, 3}, {0.2, 0.3, 0.5});
  std::vector<int> counts(3, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[measure_fiducial(s, 0, rng).outcome];
  const double p[] = {0.2, 0.3, 0.5};
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(counts[k] / double(n), p[k], 5 * std::sqrt(p[k] * (1 - p[k]) / n));
}

TEST(Distinguishing, LeastDifferingFiducial) {
  EXPECT_EQ(distinguishing_fiducial(PureGbit::two_by_two(0), PureGbit::two_by_two(1)), kGbitZ);
  EXPECT_EQ(distinguishing_fiducial(PureGbit::two_by_two(0), PureGbit::two_by_two(3)), kGbitX);
  EXPECT_EQ(distinguishing_fiducial(PureGbit::two_by_two(2), PureGbit::two_by_two(2)), std::nullopt);
}

TEST(PrBox, CorrelationAndUniformMarginals) {
  Rng rng(8);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      int a_ones = 0;
      const int n = 20000;
      for (int i = 0; i < n; ++i) {
        const auto o = pr_box_sample(x, y, rng);
        ASSERT_EQ(o.a ^ o.b, x && y);
        a_ones += o.a;
      }
      EXPECT_NEAR(a_ones / double(n), 0.5, 5 * std::sqrt(0.25 / n));
    }
}
