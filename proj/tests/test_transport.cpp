#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "orthosim/error.hpp"
#include "orthosim/transport.hpp"

using namespace orthosim;
using namespace orthosim::transport;

namespace {

class FlipAll : public CarrierInterceptor {
 public:
  std::vector<std::size_t> seen;
  bool intercept(Carrier& carrier, TransitContext& context) override {
    seen.push_back(context.transit_index);
    auto& g = std::get<gpt::GptState>(carrier);
    g = gpt::PureGbit::codeword(g.spec(), true).state();
    return true;
  }
};

}  // namespace

TEST(PermutationTest, InverseAndCompose) {
  Rng rng(1);
  const auto p = Permutation::random(20, rng);
  EXPECT_EQ(p.compose(p.inverse()), Permutation::identity(20));
  EXPECT_EQ(p.inverse().compose(p), Permutation::identity(20));
  for (std::size_t s = 0; s < 20; ++s) EXPECT_EQ(p.source_of(p.slot_of(s)), s);
  EXPECT_THROW(Permutation({0, 0, 1}), InvalidSpec);
  EXPECT_THROW(Permutation({0, 3}), InvalidSpec);
}

TEST(PermutationTest, RandomIsUniformOnS3) {
  Rng rng(2);
  std::map<std::vector<std::size_t>, int> counts;
  const int n = 60000;
  for (int i = 0; i < n; ++i) {
    const auto p = Permutation::random(3, rng);
    ++counts[std::vector<std::size_t>(p.mapping().begin(), p.mapping().end())];
  }
  ASSERT_EQ(counts.size(), 6u);
  const double sigma = std::sqrt(n * (1.0 / 6) * (5.0 / 6));
  for (const auto& [k, c] : counts) EXPECT_NEAR(c, n / 6.0, 5 * sigma);
}

TEST(PermutationTest, RevealRoundTrip) {
  Rng rng(3);
  const auto p = Permutation::random(9, rng);
  EXPECT_EQ(permutation_from_message(reveal_permutation(p)), p);
}

TEST(Unscramble, RestoresSourceOrder) {
  const Permutation p({2, 0, 1});
  const std::vector<char> sent = {'a', 'b', 'c'};
  std::vector<char> received;
  for (std::size_t slot = 0; slot < 3; ++slot) received.push_back(sent[p.source_of(slot)]);
  EXPECT_EQ(unscramble<char>(received, p), sent);
  const std::size_t sources[] = {2, 0};
  const auto partial = unscramble_partial<char>(received, reveal_positions(p, sources));
  ASSERT_EQ(partial.size(), 2u);
  EXPECT_EQ(partial[0], std::make_pair(std::size_t{2}, 'c'));
  EXPECT_EQ(partial[1], std::make_pair(std::size_t{0}, 'a'));
}

TEST(LinkTest, BlockDeliveryOrderAndEveSeesSlots) {
  const gpt::FiducialSpec spec{2, 2};
  std::vector<Carrier> block;
  for (int i = 0; i < 4; ++i) block.emplace_back(gpt::PureGbit::codeword(spec, false).state());
  Link link({}, Rng(0));
  FlipAll eve;
  const auto out = link.send_block(Party::alice, block, Permutation({3, 1, 0, 2}), &eve);
  EXPECT_EQ(eve.seen, (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_EQ(link.carriers_sent(), 4u);
  for (const auto& rec : link.transcript().records()) EXPECT_TRUE(rec.tampered);
  EXPECT_EQ(std::get<gpt::GptState>(out[0]), gpt::PureGbit::codeword(spec, true).state());
}

TEST(LinkTest, DuplicateParticleRejected) {
  quantum::QuantumRegistry reg;
  const auto [a, b] = reg.create_singlet();
  (void)b;
  Link link({}, Rng(0), &reg);
  EXPECT_THROW(link.send_stream(Party::alice, {Carrier(a), Carrier(a)}, nullptr), InvalidSpec);
  EXPECT_THROW(link.send_block(Party::alice, {Carrier(a)}, Permutation::identity(2), nullptr), InvalidSpec);
}

TEST(LinkTest, BroadcastReachesEveryView) {
  Link link({}, Rng(0));
  link.classical_broadcast(Party::bob, {"check", {1, 0, 1}});
  for (auto party : {Party::alice, Party::bob, Party::eve}) {
    ASSERT_EQ(link.view(party).size(), 1u);
    EXPECT_EQ(link.latest(party, "check")->data, (std::vector<std::int64_t>{1, 0, 1}));
  }
  EXPECT_EQ(link.latest(Party::eve, "missing"), nullptr);
}

TEST(LinkTest, GbitNoise) {
  const gpt::FiducialSpec spec{2, 3};
  const auto zero = gpt::PureGbit::codeword(spec, false).state();
  Link flip({NoiseKind::bit_flip, 1.0}, Rng(0));
  const auto out = flip.send_stream(Party::alice, {Carrier(zero)}, nullptr);
  EXPECT_EQ(std::get<gpt::GptState>(out[0]), gpt::PureGbit::codeword(spec, true).state());
  Link dep({NoiseKind::depolarizing, 1.0}, Rng(0));
  const auto mixed = dep.send_stream(Party::alice, {Carrier(zero)}, nullptr);
  EXPECT_EQ(std::get<gpt::GptState>(mixed[0]), gpt::GptState::maximally_mixed(spec));
}

TEST(TranscriptTest, JsonlRoundTrip) {
  Link link({}, Rng(0));
  link.classical_broadcast(Party::alice, {"check-rounds", {4, 7}});
  link.send_stream(Party::alice, {Carrier(gpt::GptState::maximally_mixed({2, 2}))}, nullptr);
  link.classical_broadcast(Party::bob, {"ack", {}});
  const auto text = link.transcript().to_jsonl();
  std::istringstream in(text);
  EXPECT_EQ(Transcript::read_jsonl(in), link.transcript());
  EXPECT_NE(text.find("\"payload\":\"check-rounds:4,7\""), std::string::npos);
}

TEST(TranscriptTest, RejectsMalformed) {
  std::istringstream bad_json("{\"round\":0,");
  EXPECT_THROW(Transcript::read_jsonl(bad_json), InvalidSpec);
  std::istringstream out_of_order(
      "{\"round\":1,\"channel\":\"classical\",\"sender\":\"alice\",\"payload\":\"a:\",\"tampered\":false}\n"
      "{\"round\":0,\"channel\":\"classical\",\"sender\":\"alice\",\"payload\":\"b:\",\"tampered\":false}\n");
  EXPECT_THROW(Transcript::read_jsonl(out_of_order), InvalidSpec);
  std::istringstream tampered_classical(
      "{\"round\":0,\"channel\":\"classical\",\"sender\":\"bob\",\"payload\":\"a:\",\"tampered\":true}\n");
  EXPECT_THROW(Transcript::read_jsonl(tampered_classical), InvalidSpec);
}

TEST(Payload, EncodeDecode) {
  const ClassicalMessage m{"reveal", {-3, 0, 12}};
  EXPECT_EQ(encode_payload(m), "reveal:-3,0,12");
  EXPECT_EQ(decode_payload("reveal:-3,0,12"), m);
  EXPECT_EQ(decode_payload("no-colon"), std::nullopt);
  EXPECT_EQ(decode_payload("x:1,,2"), std::nullopt);
}
